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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include "fockflow/fock_state.hpp"

namespace fockflow {

class StateFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Text format:
//
//   fock-state v1 modes=M cutoff=N
//   k1 [k2] re im          (N^M lines, row-major)
//
// Numbers are printed with 17 significant digits, so reading a written
// file reproduces the amplitudes bit for bit.
void write_state(std::ostream& os, const FockState& state);
FockState read_state(std::istream& is);

void save_state(const std::filesystem::path& path, const FockState& state);
FockState load_state(const std::filesystem::path& path);

}  // namespace fockflow
