// include/labelseq/templating.h

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

#ifndef LABELSEQ_TEMPLATING_H_
#define LABELSEQ_TEMPLATING_H_

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "labelseq/corpus.h"

namespace labelseq {

inline constexpr std::string_view kMaskPlaceholder = "[MASK]";

struct Literal {
  std::string text;
  bool operator==(const Literal &) const = default;
};
struct FieldRef {
  size_t index;
  bool operator==(const FieldRef &) const = default;
};
struct MaskSlot {
  bool operator==(const MaskSlot &) const = default;
};

using TemplateSegment = std::variant<Literal, FieldRef, MaskSlot>;

// A concatenation rule with exactly one mask slot.
class Template {
 public:
  // Throws UsageError unless there is exactly one MaskSlot.
  Template(std::string name, std::vector<TemplateSegment> segments);

  // Pattern DSL: "{0}? [MASK], {1}". "{{" and "}}" escape braces.
  static Template parse(std::string_view pattern, std::string name = "custom");

  const std::string &name() const { return name_; }
  const std::vector<TemplateSegment> &segments() const { return segments_; }
  // One past the highest field index referenced.
  size_t arity() const { return arity_; }
  std::string pattern() const;

 private:
  std::string name_;
  std::vector<TemplateSegment> segments_;
  size_t arity_ = 0;
};

struct RenderedInput {
  std::string text;
  size_t mask_byte_offset = 0;

  bool operator==(const RenderedInput &) const = default;
};

Template builtin_template(TaskKind kind);

// Throws DataError on arity mismatch or a field that already contains the
// mask placeholder.
RenderedInput render(const Template &tmpl, const Example &example);

// Wraps raw text that already carries exactly one placeholder.
RenderedInput rendered_from_text(std::string text);

}  // namespace labelseq

#endif  // LABELSEQ_TEMPLATING_H_
