// Copyright 2026 The Prosoval Authors.
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

#ifndef PROSOVAL_ARCHCHECK_HPP
#define PROSOVAL_ARCHCHECK_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace prosoval {

// Static verifier for the Tacotron-2 conditioning variants: builds a
// declarative layer graph per variant, propagates channel dimensions
// through it, counts parameters, and reports every place where a
// declared input width disagrees with what actually feeds it.
// Mismatches are reported, never auto-adapted.

enum class LayerKind {
  Embedding,
  Conv1d,
  BiRecurrent,
  Recurrent,
  FullyConnected,
  Activation,
  Concat,
  AttentionContext,
};

struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::FullyConnected;
  int in_dim = 0;
  int out_dim = 0;
  int kernel = 0;  // Conv1d only
};

struct Port {
  std::string name;
  int dim = 0;
};

// producer/consumer are layer names or graph port names; port is the
// consumer's input slot (Concat consumes slots 0..k-1, everything else
// slot 0 only).
struct GraphEdge {
  std::string producer;
  std::string consumer;
  int port = 0;
};

struct ModuleGraph {
  std::vector<LayerSpec> layers;
  std::vector<GraphEdge> edges;
  std::vector<Port> inputs;
  std::vector<Port> outputs;
};

enum class Variant {
  baseline,
  pre_encoder,
  pre_decoder,
  intra_decoder,
  combo,
};

// CLI spelling: baseline, pre-encoder, pre-decoder, intra-decoder, combo.
std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);
std::vector<Variant> all_variants();

struct ArchConfig {
  int conv_kernel = 5;  // Table 1 omits kernel sizes
  int vocab = 148;
  // Alternative reading of the classifier Bi-LSTM tuple: hidden size
  // per direction instead of total output. Selecting it surfaces a
  // width mismatch at the classifier head.
  bool classifier_full_hidden = false;
};

struct ShapeMismatch {
  std::string layer;
  int expected_in = 0;
  int actual_in = 0;
};

struct ResolvedShape {
  std::string layer;
  int in_dim = 0;       // declared
  int actual_in = 0;    // sum of feeding widths
  int out_dim = 0;
};

struct ShapeReport {
  std::vector<ResolvedShape> layers;        // sorted by layer name
  std::vector<ShapeMismatch> mismatches;    // sorted by layer name
  long long param_count = 0;
};

struct CheckResult {
  Variant variant = Variant::baseline;
  bool pass = false;
  std::vector<ShapeMismatch> mismatches;
  long long param_count = 0;
  ArchConfig assumptions;
};

ModuleGraph build_graph(Variant v, const ArchConfig& cfg = {});

// Forward pass in topological order; the result is independent of
// topological tie-breaking because each layer's actual input width
// depends only on its direct producers' declared widths. Cyclic graphs
// and multiply-fed ports are validation errors.
ShapeReport propagate_shapes(const ModuleGraph& g, int seq_len);

// FullyConnected: in*out + out; Conv1d: in*out*kernel + out;
// Recurrent (LSTM): 4*((in + h)*h + h) with h = out;
// BiRecurrent: two Recurrents with h = out/2; Embedding: vocab*out.
// Activation, Concat and AttentionContext carry no parameters.
long long param_count(const ModuleGraph& g);

CheckResult verify_table1(Variant v, const ArchConfig& cfg = {});

}  // namespace prosoval

#endif  // PROSOVAL_ARCHCHECK_HPP
