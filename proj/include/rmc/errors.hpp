#pragma once

#include <stdexcept>
#include <string>

namespace rmc {

// Iterative numerics that did not reach its tolerance (eigensolver sweeps,
// power iteration, adaptive quadrature). Carries the residual achieved.
class NumericalFailure : public std::runtime_error {
  public:
    NumericalFailure(const std::string& what, double residual)
        : std::runtime_error(what + " (achieved residual " + std::to_string(residual) + ")"),
          residual_(residual) {}
    double residual() const noexcept { return residual_; }

  private:
    double residual_ = 0.0;
};

class IoFailure : public std::runtime_error {
  public:
    IoFailure(const std::string& what, const std::string& path)
        : std::runtime_error(what + ": " + path), path_(path) {}
    const std::string& path() const noexcept { return path_; }

  private:
    std::string path_;
};

}  // namespace rmc
