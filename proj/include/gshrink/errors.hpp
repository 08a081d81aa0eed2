#pragma once

#include <stdexcept>
#include <string>

namespace gshrink {

// Base class for every error raised by the library. The CLI prints what()
// as its single diagnostic line.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class DegenerateChannelError : public Error {
 public:
  using Error::Error;
};

class RankDeficiencyError : public Error {
 public:
  using Error::Error;
};

// Near-singular spectral matrix, or a VAR transfer matrix that cannot be
// inverted at some frequency.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

class StabilityError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Runs fn(); a library error escaping it is rethrown as the same type with
// `context` prefixed to the message.
template <class F>
auto with_context(const std::string& context, F&& fn) {
  const auto tag = [&context](const std::exception& e) { return context + ": " + e.what(); };
  try {
    return fn();
  } catch (const InsufficientDataError& e) {
    throw InsufficientDataError(tag(e));
  } catch (const DimensionError& e) {
    throw DimensionError(tag(e));
  } catch (const DegenerateChannelError& e) {
    throw DegenerateChannelError(tag(e));
  } catch (const RankDeficiencyError& e) {
    throw RankDeficiencyError(tag(e));
  } catch (const ConditioningError& e) {
    throw ConditioningError(tag(e));
  } catch (const StabilityError& e) {
    throw StabilityError(tag(e));
  } catch (const DomainError& e) {
    throw DomainError(tag(e));
  } catch (const FormatError& e) {
    throw FormatError(tag(e));
  } catch (const ConfigError& e) {
    throw ConfigError(tag(e));
  } catch (const Error& e) {
    throw Error(tag(e));
  }
}

}  // namespace gshrink
