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

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace toolsmith::xml
{

class XmlError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct Element
{
  std::string name;
  std::map<std::string, std::string> attributes;
  std::vector<Element> children;
  std::string text;
  int line = 0;

  const Element * child(const std::string & child_name) const;
  std::vector<const Element *> children_named(const std::string & child_name) const;
  std::optional<std::string> attribute(const std::string & key) const;
};

/// Parses a complete document and returns its root element.
Element parse(const std::string & document);

}  // namespace toolsmith::xml
