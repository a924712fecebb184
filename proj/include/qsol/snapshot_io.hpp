#pragma once

#include <string>

#include "qsol/state.hpp"

namespace qsol {

// Binary snapshot container (exact layout in README):
//   bytes 0..7   magic "QSOLSNP1"
//   u32          byte-order tag 0x01020304 (reader refuses a mismatch)
//   u32          domain (0 = position, 1 = frequency)
//   u64          M
//   f64          L
//   f64          t
//   mean         M   complex<f64> (re, im)
//   normal       M*M complex<f64>, column-major
//   anomalous    M*M complex<f64>, column-major
void save_snapshot(const GaussianState& s, const std::string& path);
GaussianState load_snapshot(const std::string& path);

}  // namespace qsol
