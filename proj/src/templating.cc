// src/templating.cc

// Copyright 2026 The labelseq Authors
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

#include "labelseq/templating.h"

#include "labelseq/error.h"

namespace labelseq {

Template::Template(std::string name, std::vector<TemplateSegment> segments)
    : name_(std::move(name)), segments_(std::move(segments)) {
  size_t masks = 0;
  for (const auto &seg : segments_) {
    if (std::holds_alternative<MaskSlot>(seg)) ++masks;
    if (const auto *f = std::get_if<FieldRef>(&seg))
      arity_ = std::max(arity_, f->index + 1);
    if (const auto *lit = std::get_if<Literal>(&seg);
        lit && lit->text.find(kMaskPlaceholder) != std::string::npos)
      throw UsageError("template literal contains the mask placeholder");
  }
  if (masks != 1)
    throw UsageError("template '" + name_ + "' must contain exactly one " +
                     std::string(kMaskPlaceholder) + ", found " +
                     std::to_string(masks));
}

Template Template::parse(std::string_view pattern, std::string name) {
  std::vector<TemplateSegment> segs;
  std::string literal;
  auto flush = [&] {
    if (!literal.empty()) segs.push_back(Literal{std::move(literal)});
    literal.clear();
  };
  size_t i = 0;
  while (i < pattern.size()) {
    if (pattern.compare(i, 2, "{{") == 0) {
      literal += '{';
      i += 2;
    } else if (pattern.compare(i, 2, "}}") == 0) {
      literal += '}';
      i += 2;
    } else if (pattern[i] == '{') {
      const size_t close = pattern.find('}', i);
      if (close == std::string_view::npos)
        throw UsageError("unterminated '{' in template pattern");
      const std::string_view digits = pattern.substr(i + 1, close - i - 1);
      if (digits.empty() ||
          digits.find_first_not_of("0123456789") != std::string_view::npos)
        throw UsageError("bad field reference '{" + std::string(digits) +
                         "}' in template pattern");
      flush();
      segs.push_back(FieldRef{std::stoul(std::string(digits))});
      i = close + 1;
    } else if (pattern.compare(i, kMaskPlaceholder.size(), kMaskPlaceholder) ==
               0) {
      flush();
      segs.push_back(MaskSlot{});
      i += kMaskPlaceholder.size();
    } else if (pattern[i] == '}') {
      throw UsageError("unmatched '}' in template pattern");
    } else {
      literal += pattern[i++];
    }
  }
  flush();
  return Template(std::move(name), std::move(segs));
}

std::string Template::pattern() const {
  std::string out;
  for (const auto &seg : segments_) {
    if (const auto *lit = std::get_if<Literal>(&seg)) {
      for (char c : lit->text) {
        if (c == '{' || c == '}') out += c;
        out += c;
      }
    } else if (const auto *f = std::get_if<FieldRef>(&seg)) {
      out += "{" + std::to_string(f->index) + "}";
    } else {
      out += kMaskPlaceholder;
    }
  }
  return out;
}

Template builtin_template(TaskKind kind) {
  switch (kind) {
    case TaskKind::kSingleSentence:
      return Template::parse("{0} [MASK]", "single-sentence");
    case TaskKind::kSentencePair:
      return Template::parse("{0}? [MASK], {1}", "sentence-pair");
    case TaskKind::kBoolQ:
      return Template::parse("{0}? [MASK], {1}", "boolq-style");
    case TaskKind::kCopa:
      return Template::parse("{0} {1}? {2}? [MASK], {3}", "copa-style");
    case TaskKind::kMultiRC:
      return Template::parse("{1} [MASK], {2} {0}", "multirc-style");
    case TaskKind::kWiC:
      return Template::parse("{0} {1} '{2}' [MASK]", "wic-style");
  }
  throw UsageError("no built-in template for this task kind");
}

RenderedInput render(const Template &tmpl, const Example &example) {
  if (example.fields.size() != tmpl.arity())
    throw DataError("template '" + tmpl.name() + "' expects " +
                    std::to_string(tmpl.arity()) + " fields, example has " +
                    std::to_string(example.fields.size()));
  RenderedInput out;
  for (const auto &seg : tmpl.segments()) {
    if (const auto *lit = std::get_if<Literal>(&seg)) {
      out.text += lit->text;
    } else if (const auto *f = std::get_if<FieldRef>(&seg)) {
      const std::string &field = example.fields[f->index];
      if (field.find(kMaskPlaceholder) != std::string::npos)
        throw DataError("field " + std::to_string(f->index) +
                        " contains the mask placeholder");
      out.text += field;
    } else {
      out.mask_byte_offset = out.text.size();
      out.text += kMaskPlaceholder;
    }
  }
  return out;
}

RenderedInput rendered_from_text(std::string text) {
  const size_t first = text.find(kMaskPlaceholder);
  if (first == std::string::npos ||
      text.find(kMaskPlaceholder, first + 1) != std::string::npos)
    throw DataError("model input must contain exactly one " +
                    std::string(kMaskPlaceholder));
  return RenderedInput{std::move(text), first};
}

}  // namespace labelseq
