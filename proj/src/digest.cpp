// Copyright 2026 The Toolsmith Authors
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

#include "toolsmith/digest.hpp"

#include <openssl/sha.h>

#include <array>

namespace toolsmith
{
namespace
{

std::array<unsigned char, SHA256_DIGEST_LENGTH> sha256(std::string_view data)
{
  std::array<unsigned char, SHA256_DIGEST_LENGTH> out{};
  SHA256(reinterpret_cast<const unsigned char *>(data.data()), data.size(), out.data());
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view data)
{
  static const char * hex = "0123456789abcdef";
  std::string out;
  for (unsigned char b : sha256(data)) {
    out.push_back(hex[b >> 4]);
    out.push_back(hex[b & 0xf]);
  }
  return out;
}

std::uint64_t sha256_u64(std::string_view data)
{
  const auto d = sha256(data);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v = (v << 8) | d[static_cast<std::size_t>(i)];
  }
  return v;
}

}  // namespace toolsmith
