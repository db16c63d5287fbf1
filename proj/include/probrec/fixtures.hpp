/* Copyright 2026 The probrec Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// The bundled corpus, addressable by name. Layout under the fixture root:
//   machines/NAME.json   terms/NAME.term   tier/NAME.term
//   programs/NAME.prm    expected/NAME.json

#ifndef PROBREC_FIXTURES_HPP_
#define PROBREC_FIXTURES_HPP_

#include <string>
#include <vector>

namespace probrec {
namespace fixtures {

// $PROBREC_FIXTURES when set, else the source tree's fixtures directory.
std::string Dir();

struct Fixture {
  std::string name;
  std::string kind;  // machine, term, tier, program, expected
  std::string path;
};

// Sorted by kind, then name.
std::vector<Fixture> List();
std::vector<Fixture> List(const std::string& kind);
// UnknownName when absent.
Fixture Find(const std::string& name);

// An existing file: `path` as given, relative to base_dir, or the name of
// a bundled fixture. UnknownName otherwise.
std::string ResolvePath(const std::string& path, const std::string& base_dir = ".");

}  // namespace fixtures
}  // namespace probrec

#endif  // PROBREC_FIXTURES_HPP_
