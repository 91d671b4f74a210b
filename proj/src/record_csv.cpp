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

#include <charconv>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "cvqkd/errors.hpp"
#include "cvqkd/record.hpp"

namespace cvqkd {

const char* to_string(Detection d) {
  return d == Detection::heterodyne ? "heterodyne" : "homodyne";
}

Detection detection_from_string(const std::string& s) {
  if (s == "heterodyne") return Detection::heterodyne;
  if (s == "homodyne") return Detection::homodyne;
  throw DomainError("unknown detection '" + s + "' (expected heterodyne or homodyne)");
}

std::uint64_t QuadratureRecord::modes() const { return values.size() / values_per_mode(); }

double QuadratureRecord::mode_energy(std::uint64_t mode) const {
  if (detection == Detection::heterodyne) {
    const double q = values[2 * mode];
    const double p = values[2 * mode + 1];
    return q * q + p * p;
  }
  return values[mode] * values[mode];
}

void QuadratureRecord::validate() const {
  if (detection == Detection::heterodyne && values.size() % 2 != 0) {
    throw DomainError("heterodyne record must hold an even number of values");
  }
  const std::uint64_t m = modes();
  if (tested_modes < 1 || tested_modes >= m) {
    throw DomainError("record needs at least one tested and one kept mode (modes = " +
                      std::to_string(m) + ", tested = " + std::to_string(tested_modes) + ")");
  }
  if (detection == Detection::homodyne && angles.size() != m) {
    throw DomainError("homodyne record needs one angle per mode");
  }
  if (!mode_ids.empty() && mode_ids.size() != m) {
    throw DomainError("record mode_ids length does not match mode count");
  }
}

void write_record_csv(std::ostream& out, const QuadratureRecord& rec) {
  const bool homodyne = rec.detection == Detection::homodyne;
  out << (homodyne ? "mode,q,p,tested,theta\n" : "mode,q,p,tested\n");
  std::ostringstream line;
  line << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::uint64_t i = 0; i < rec.modes(); ++i) {
    line.str("");
    const std::uint64_t id = rec.mode_ids.empty() ? i : rec.mode_ids[i];
    line << id << ',';
    if (homodyne) {
      line << rec.values[i] << ",0";
    } else {
      line << rec.values[2 * i] << ',' << rec.values[2 * i + 1];
    }
    line << ',' << (i < rec.tested_modes ? 1 : 0);
    if (homodyne) line << ',' << rec.angles[i];
    out << line.str() << '\n';
  }
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DomainError("record CSV line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
}

std::uint64_t parse_uint(const std::string& s, std::size_t line_no) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DomainError("record CSV line " + std::to_string(line_no) + ": bad integer '" + s +
                      "'");
  }
  return v;
}

struct Row {
  std::uint64_t mode;
  double q;
  double p;
  bool tested;
  double theta;
};

}  // namespace

QuadratureRecord read_record_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("record CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  bool homodyne = false;
  if (line == "mode,q,p,tested,theta") {
    homodyne = true;
  } else if (line != "mode,q,p,tested") {
    throw DomainError("record CSV: expected header 'mode,q,p,tested', got '" + line + "'");
  }
  const std::size_t columns = homodyne ? 5 : 4;
  std::vector<Row> tested;
  std::vector<Row> kept;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != columns) {
      throw DomainError("record CSV line " + std::to_string(line_no) + ": expected " +
                        std::to_string(columns) + " fields");
    }
    Row r{parse_uint(f[0], line_no), parse_double(f[1], line_no), parse_double(f[2], line_no),
          false, homodyne ? parse_double(f[4], line_no) : 0.0};
    const std::uint64_t flag = parse_uint(f[3], line_no);
    if (flag > 1) {
      throw DomainError("record CSV line " + std::to_string(line_no) + ": tested must be 0 or 1");
    }
    r.tested = flag == 1;
    (r.tested ? tested : kept).push_back(r);
  }
  QuadratureRecord rec;
  rec.detection = homodyne ? Detection::homodyne : Detection::heterodyne;
  rec.tested_modes = tested.size();
  for (const auto* group : {&tested, &kept}) {
    for (const Row& r : *group) {
      rec.mode_ids.push_back(r.mode);
      rec.values.push_back(r.q);
      if (homodyne) {
        rec.angles.push_back(r.theta);
      } else {
        rec.values.push_back(r.p);
      }
    }
  }
  rec.validate();
  return rec;
}

}  // namespace cvqkd
