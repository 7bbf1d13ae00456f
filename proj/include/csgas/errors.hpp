#pragma once

#include <stdexcept>
#include <string>

namespace csgas {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct QuadratureNotConverged : Error {
  explicit QuadratureNotConverged(const std::string& msg) : Error(msg) {}
};

struct PVUnstable : Error {
  explicit PVUnstable(const std::string& msg) : Error(msg) {}
};

struct IterationNotConverged : Error {
  explicit IterationNotConverged(const std::string& msg) : Error(msg) {}
};

struct DenominatorVanishes : Error {
  explicit DenominatorVanishes(const std::string& msg) : Error(msg) {}
};

struct StepTooCoarse : Error {
  explicit StepTooCoarse(const std::string& msg) : Error(msg) {}
};

struct IntegratorDiverged : Error {
  explicit IntegratorDiverged(const std::string& msg) : Error(msg) {}
};

struct WindowEmpty : Error {
  explicit WindowEmpty(const std::string& msg) : Error(msg) {}
};

struct IllConditionedFit : Error {
  explicit IllConditionedFit(const std::string& msg) : Error(msg) {}
};

struct EtaTooSmall : Error {
  explicit EtaTooSmall(const std::string& msg) : Error(msg) {}
};

struct CutoffTooSmall : Error {
  explicit CutoffTooSmall(const std::string& msg) : Error(msg) {}
};

struct NewtonDiverged : Error {
  explicit NewtonDiverged(const std::string& msg) : Error(msg) {}
};

struct GridTooNarrow : Error {
  explicit GridTooNarrow(const std::string& msg) : Error(msg) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace csgas
