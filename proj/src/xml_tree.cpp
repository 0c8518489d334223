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

#include "toolsmith/xml_tree.hpp"

#include <expat.h>

namespace toolsmith::xml
{
namespace
{

struct BuildState
{
  XML_Parser parser = nullptr;
  std::vector<Element *> stack;
  Element root;
  bool have_root = false;
};

void on_start(void * user, const XML_Char * name, const XML_Char ** attrs)
{
  auto * state = static_cast<BuildState *>(user);
  Element * target = nullptr;
  if (state->stack.empty()) {
    state->root = Element{};
    state->have_root = true;
    target = &state->root;
  } else {
    auto & siblings = state->stack.back()->children;
    siblings.emplace_back();
    target = &siblings.back();
  }
  target->name = name;
  target->line = static_cast<int>(XML_GetCurrentLineNumber(state->parser));
  for (int i = 0; attrs[i] != nullptr; i += 2) {
    target->attributes[attrs[i]] = attrs[i + 1];
  }
  state->stack.push_back(target);
}

void on_end(void * user, const XML_Char *)
{
  static_cast<BuildState *>(user)->stack.pop_back();
}

void on_text(void * user, const XML_Char * s, int len)
{
  auto * state = static_cast<BuildState *>(user);
  if (!state->stack.empty()) {
    state->stack.back()->text.append(s, static_cast<std::size_t>(len));
  }
}

}  // namespace

const Element * Element::child(const std::string & child_name) const
{
  for (const auto & c : children) {
    if (c.name == child_name) {
      return &c;
    }
  }
  return nullptr;
}

std::vector<const Element *> Element::children_named(const std::string & child_name) const
{
  std::vector<const Element *> out;
  for (const auto & c : children) {
    if (c.name == child_name) {
      out.push_back(&c);
    }
  }
  return out;
}

std::optional<std::string> Element::attribute(const std::string & key) const
{
  const auto it = attributes.find(key);
  if (it == attributes.end()) {
    return std::nullopt;
  }
  return it->second;
}

Element parse(const std::string & document)
{
  BuildState state;
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
    XML_ParserCreate(nullptr), &XML_ParserFree);
  if (!parser) {
    throw XmlError("could not allocate XML parser");
  }
  state.parser = parser.get();
  XML_SetUserData(parser.get(), &state);
  XML_SetElementHandler(parser.get(), &on_start, &on_end);
  XML_SetCharacterDataHandler(parser.get(), &on_text);
  // Only the innermost open element gains children, so the stack pointers
  // into enclosing vectors stay valid.
  const auto status = XML_Parse(
    parser.get(), document.data(), static_cast<int>(document.size()), XML_TRUE);
  if (status != XML_STATUS_OK) {
    throw XmlError(
      "line " + std::to_string(XML_GetCurrentLineNumber(parser.get())) + ": " +
      XML_ErrorString(XML_GetErrorCode(parser.get())));
  }
  if (!state.have_root) {
    throw XmlError("document has no root element");
  }
  return std::move(state.root);
}

}  // namespace toolsmith::xml
