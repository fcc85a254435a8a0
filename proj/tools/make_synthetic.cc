// tools/make_synthetic.cc

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

// Writes the synthetic two-class task bundle (data, generator table,
// pretrained tiny-neural classifier, pipeline config) into a directory.
#include <iostream>

#include <CLI11.hpp>

#include "labelseq/error.h"
#include "labelseq/synthetic.h"

int main(int argc, char **argv) {
  labelseq::SyntheticOptions opt;
  std::string out;
  CLI::App app{"Generate the synthetic label-sequence task"};
  app.add_option("--out", out, "output directory")->required();
  app.add_option("--seed", opt.seed, "word and data seed");
  app.add_option("--pretrain-steps", opt.pretrain_steps, "classifier pretraining steps");
  app.add_option("--cues", opt.cues_per_class, "cue words per class");
  app.add_option("--width", opt.classifier.width, "classifier model width");
  app.add_option("--ffn", opt.classifier.ffn, "classifier feed-forward size");
  app.add_option("--pretrain-lr", opt.pretrain_learning_rate, "classifier pretraining learning rate");
  CLI11_PARSE(app, argc, argv);
  try {
    labelseq::write_synthetic_bundle(out, opt);
  } catch (const labelseq::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  }
  return 0;
}
