// Copyright 2026 The Fockflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fockflow/state_file.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace fockflow {
namespace {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <typename T>
T parse_number(const std::string& token, std::size_t line) {
  T value{};
  const char* first = token.data();
  const char* last = first + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw StateFileError("state file line " + std::to_string(line) + ": cannot parse '" + token + "'");
  }
  return value;
}

int parse_header_field(const std::string& token, const std::string& key) {
  const std::string prefix = key + "=";
  if (token.rfind(prefix, 0) != 0) {
    throw StateFileError("state file header: expected " + prefix + "..., got '" + token + "'");
  }
  return parse_number<int>(token.substr(prefix.size()), 1);
}

}  // namespace

void write_state(std::ostream& os, const FockState& state) {
  const int N = state.cutoff();
  os << "fock-state v1 modes=" << state.modes() << " cutoff=" << N << '\n';
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state.modes() == 1) {
      os << i;
    } else {
      os << i / N << ' ' << i % N;
    }
    os << ' ' << format_double(state[i].real()) << ' ' << format_double(state[i].imag()) << '\n';
  }
}

FockState read_state(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw StateFileError("state file: empty input");
  std::istringstream header(line);
  std::string magic, version, modes_tok, cutoff_tok;
  header >> magic >> version >> modes_tok >> cutoff_tok;
  if (magic != "fock-state" || version != "v1") {
    throw StateFileError("state file: missing 'fock-state v1' header");
  }
  const int modes = parse_header_field(modes_tok, "modes");
  const int cutoff = parse_header_field(cutoff_tok, "cutoff");
  FockState state;
  try {
    state = FockState(modes, cutoff);
  } catch (const std::invalid_argument& e) {
    throw StateFileError(std::string("state file header: ") + e.what());
  }

  std::size_t count = 0;
  std::size_t line_no = 1;
  std::vector<std::string> tokens;
  while (std::getline(is, line)) {
    ++line_no;
    std::istringstream fields(line);
    tokens.clear();
    for (std::string t; fields >> t;) tokens.push_back(t);
    if (tokens.empty()) continue;
    if (tokens.size() != static_cast<std::size_t>(modes) + 2) {
      throw StateFileError("state file line " + std::to_string(line_no) + ": expected " +
                           std::to_string(modes + 2) + " fields");
    }
    std::size_t index = 0;
    for (int a = 0; a < modes; ++a) {
      int k = parse_number<int>(tokens[a], line_no);
      if (k < 0 || k >= cutoff) {
        throw StateFileError("state file line " + std::to_string(line_no) + ": index out of range");
      }
      index = index * cutoff + k;
    }
    if (index != count) {
      throw StateFileError("state file line " + std::to_string(line_no) +
                           ": indices must appear in row-major order");
    }
    state[index] = {parse_number<double>(tokens[modes], line_no),
                    parse_number<double>(tokens[modes + 1], line_no)};
    ++count;
  }
  if (count != state.size()) {
    throw StateFileError("state file: expected " + std::to_string(state.size()) +
                         " amplitudes, found " + std::to_string(count));
  }
  return state;
}

void save_state(const std::filesystem::path& path, const FockState& state) {
  std::ofstream os(path);
  if (!os) throw StateFileError("cannot open " + path.string() + " for writing");
  write_state(os, state);
}

FockState load_state(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw StateFileError("cannot open " + path.string());
  return read_state(is);
}

}  // namespace fockflow
