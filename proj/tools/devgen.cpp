// Copyright 2026 The qmlsim developers
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

// Regenerates the bundled device spec files from the built-in generators.

#include <filesystem>
#include <iostream>

#include "qmlsim/device.hpp"

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "data/devices";
  std::filesystem::create_directories(dir);
  qmlsim::save_device_spec(qmlsim::all_to_all_device(12),
                           dir / "all_to_all_12.json");
  qmlsim::save_device_spec(qmlsim::heavy_hex_127_device(),
                           dir / "heavy_hex_127.json");
  std::cout << "wrote device specs to " << dir << "\n";
  return 0;
}
