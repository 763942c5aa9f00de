#pragma once

#include <stdexcept>
#include <string>

namespace pricefront {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (t <= 0, x outside [-1,1], ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Evaluation time lies beyond the stored history.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// A derivative was requested inside a source/sink exclusion zone.
class SingularEvaluation : public Error {
 public:
  using Error::Error;
};

class InvalidInitialData : public Error {
 public:
  enum class Reason { multiple_zeros, sign_structure, boundary_slope, slope_window, mass, grid };

  InvalidInitialData(Reason reason, const std::string& what) : Error(what), reason_(reason) {}
  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

const char* to_string(InvalidInitialData::Reason reason) noexcept;

class IterationDiverged : public Error {
 public:
  using Error::Error;
};

class NoBracket : public Error {
 public:
  using Error::Error;
};

class MultipleZeroSuspected : public Error {
 public:
  using Error::Error;
};

class DegenerateFront : public Error {
 public:
  using Error::Error;
};

/// One of the blow-up criteria tripped its threshold during a solve.
class BlowupDetected : public Error {
 public:
  enum class Criterion { sup_norm, flux, curvature };
  struct Panel {
    double t = 0.0;
    double norm_inf = 0.0;
    double lambda = 0.0;
    double fxx_at_p = 0.0;
  };

  BlowupDetected(Criterion criterion, Panel panel, const std::string& what)
      : Error(what), criterion_(criterion), panel_(panel) {}
  Criterion criterion() const noexcept { return criterion_; }
  const Panel& panel() const noexcept { return panel_; }

 private:
  Criterion criterion_;
  Panel panel_;
};

const char* to_string(BlowupDetected::Criterion criterion) noexcept;

}  // namespace pricefront
