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

#include "probrec/fixtures.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>

#include "probrec/errors.hpp"

#ifndef PROBREC_DEFAULT_FIXTURES
#define PROBREC_DEFAULT_FIXTURES "fixtures"
#endif

namespace probrec {
namespace fixtures {

namespace fs = std::filesystem;

namespace {

struct KindDir {
  const char* kind;
  const char* dir;
  const char* ext;
};

constexpr KindDir kKinds[] = {
    {"machine", "machines", ".json"}, {"term", "terms", ".term"},
    {"tier", "tier", ".term"},        {"program", "programs", ".prm"},
    {"expected", "expected", ".json"},
};

}  // namespace

std::string Dir() {
  const char* env = std::getenv("PROBREC_FIXTURES");
  return env && *env ? std::string(env) : std::string(PROBREC_DEFAULT_FIXTURES);
}

std::vector<Fixture> List(const std::string& kind) {
  std::vector<Fixture> out;
  for (const auto& k : kKinds) {
    if (kind != k.kind) continue;
    fs::path dir = fs::path(Dir()) / k.dir;
    if (!fs::is_directory(dir)) continue;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().extension() == k.ext) {
        out.push_back({e.path().stem().string(), k.kind, e.path().string()});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Fixture& a, const Fixture& b) { return a.name < b.name; });
  return out;
}

std::vector<Fixture> List() {
  std::vector<Fixture> out;
  for (const auto& k : kKinds) {
    auto part = List(k.kind);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

Fixture Find(const std::string& name) {
  for (const auto& f : List()) {
    if (f.name == name) return f;
  }
  throw UnknownName("no fixture named '" + name + "' under " + Dir());
}

std::string ResolvePath(const std::string& path, const std::string& base_dir) {
  fs::path p(path);
  if (fs::is_regular_file(p)) return p.string();
  if (p.is_relative() && fs::is_regular_file(fs::path(base_dir) / p)) {
    return (fs::path(base_dir) / p).string();
  }
  std::string stem = p.stem().string();
  for (const auto& f : List()) {
    if (f.name == path || f.name == stem) return f.path;
  }
  throw UnknownName("cannot find '" + path + "' (also searched fixtures under " + Dir() + ")");
}

}  // namespace fixtures
}  // namespace probrec
