#include "pricefront/errors.hpp"

namespace pricefront {

const char* to_string(InvalidInitialData::Reason reason) noexcept {
  switch (reason) {
    case InvalidInitialData::Reason::multiple_zeros: return "multiple zeros";
    case InvalidInitialData::Reason::sign_structure: return "sign structure";
    case InvalidInitialData::Reason::boundary_slope: return "boundary slope";
    case InvalidInitialData::Reason::slope_window: return "slope window";
    case InvalidInitialData::Reason::mass: return "mass";
    case InvalidInitialData::Reason::grid: return "grid";
  }
  return "unknown";
}

const char* to_string(BlowupDetected::Criterion criterion) noexcept {
  switch (criterion) {
    case BlowupDetected::Criterion::sup_norm: return "sup norm";
    case BlowupDetected::Criterion::flux: return "flux";
    case BlowupDetected::Criterion::curvature: return "curvature at the front";
  }
  return "unknown";
}

}  // namespace pricefront
