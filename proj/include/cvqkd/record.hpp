// Copyright 2026 The cvqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CVQKD_RECORD_HPP_
#define CVQKD_RECORD_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cvqkd {

enum class Detection { heterodyne, homodyne };

const char* to_string(Detection d);
Detection detection_from_string(const std::string& s);

// Bob's phase-space outcomes in shot-noise units, tested modes first.
//
// Heterodyne records hold 2m interleaved values (q_1, p_1, q_2, p_2, ...).
// Homodyne records hold m values, one quadrature per mode, measured along
// the angle stored in `angles`.
struct QuadratureRecord {
  Detection detection = Detection::heterodyne;
  std::vector<double> values;
  std::vector<double> angles;
  std::uint64_t tested_modes = 0;
  // Original mode label for each position; empty means 0, 1, 2, ...
  std::vector<std::uint64_t> mode_ids;

  std::uint64_t modes() const;
  std::uint64_t kept_modes() const { return modes() - tested_modes; }
  std::size_t values_per_mode() const { return detection == Detection::heterodyne ? 2 : 1; }
  // Sum of squared outcomes over a mode.
  double mode_energy(std::uint64_t mode) const;

  // Throws DomainError when a structural invariant fails.
  void validate() const;
};

// CSV with a mandatory header `mode,q,p,tested`. Homodyne records append a
// `theta` column and leave `p` at zero. Reading reorders rows so that tested
// modes come first and keeps the original labels in mode_ids.
void write_record_csv(std::ostream& out, const QuadratureRecord& rec);
QuadratureRecord read_record_csv(std::istream& in);

}  // namespace cvqkd

#endif  // CVQKD_RECORD_HPP_
