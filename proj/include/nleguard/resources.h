//
// Copyright 2026 The nleguard Authors
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
//

#ifndef NLEGUARD_RESOURCES_H_
#define NLEGUARD_RESOURCES_H_

#include <string_view>

// Data files compiled into the library (see data/).
namespace nleguard::resources {

std::string_view Lexicon();
std::string_view Stopwords();
std::string_view Templates();
std::string_view Blocklist();

}  // namespace nleguard::resources

#endif  // NLEGUARD_RESOURCES_H_
