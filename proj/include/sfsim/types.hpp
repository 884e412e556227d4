#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sfsim {

using cfloat = std::complex<float>;
using cdouble = std::complex<double>;

// Row-major dense operators.
using Mat2 = std::array<cdouble, 4>;
using Mat4 = std::array<cdouble, 16>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& msg)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class MemoryBudgetError : public Error {
 public:
  MemoryBudgetError(std::uint64_t required, std::uint64_t budget)
      : Error("state needs " + std::to_string(required) + " bytes, budget is " +
              std::to_string(budget)),
        required_(required) {}
  std::uint64_t required_bytes() const { return required_; }

 private:
  std::uint64_t required_;
};

}  // namespace sfsim
