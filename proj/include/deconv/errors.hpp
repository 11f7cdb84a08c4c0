#pragma once

#include <stdexcept>
#include <string>

namespace deconv {

// Two-sample system with a (numerically) vanishing determinant.
class SingularError : public std::runtime_error {
 public:
  explicit SingularError(const std::string& what, double condition = 0.0)
      : std::runtime_error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

class SelectionError : public std::runtime_error {
 public:
  SelectionError(const std::string& what, std::size_t spike)
      : std::runtime_error(what), spike_(spike) {}
  std::size_t spike() const { return spike_; }

 private:
  std::size_t spike_;
};

class StructureError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class InfeasibleError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace deconv
