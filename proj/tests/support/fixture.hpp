// Copyright 2026 The ne-revise Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#ifndef NE_REVISE_TEST_DATA
#error "NE_REVISE_TEST_DATA must point at tests/data"
#endif

namespace ne_revise::testing {

inline std::string data_path(const std::string& relative) {
  return std::string(NE_REVISE_TEST_DATA) + "/" + relative;
}

struct DmRow {
  std::string word;
  std::string primary;
  std::string alternate;
};

// word<TAB>primary<TAB>alternate per line.
inline std::vector<DmRow> load_dm_fixture() {
  std::ifstream in(data_path("double_metaphone_fixture.tsv"));
  if (!in) throw std::runtime_error("missing Double Metaphone fixture");
  std::vector<DmRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = line.find('\t', t1 + 1);
    rows.push_back({line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1), line.substr(t2 + 1)});
  }
  return rows;
}

}  // namespace ne_revise::testing
