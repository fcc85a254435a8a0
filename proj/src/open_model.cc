// src/open_model.cc

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

#include "labelseq/error.h"
#include "labelseq/model.h"
#include "labelseq/remote.h"
#include "labelseq/tabular_model.h"
#include "labelseq/tiny_neural.h"

namespace labelseq {

std::unique_ptr<LanguageModel> open_model(Backend backend, const std::string &location) {
  if (location.empty()) throw UsageError("no model location given");
  switch (backend) {
    case Backend::kTabular:
      return std::make_unique<TabularModel>(TabularModel::load(location));
    case Backend::kTinyNeural:
      return std::make_unique<TinyNeuralModel>(TinyNeuralModel::load(location));
    case Backend::kRemote:
      return connect_remote(location);
  }
  throw InternalError("unhandled backend");
}

}  // namespace labelseq
