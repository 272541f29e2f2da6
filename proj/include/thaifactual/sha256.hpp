//
// Copyright 2026 The ThaiFACTUAL Authors
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

#ifndef THAIFACTUAL_SHA256_HPP_
#define THAIFACTUAL_SHA256_HPP_

#include <string>
#include <string_view>

namespace thaifactual {

// FIPS 180-4 SHA-256, hex-encoded. Used for prompt hashes and cache keys.
std::string sha256_hex(std::string_view data);

}  // namespace thaifactual

#endif  // THAIFACTUAL_SHA256_HPP_
