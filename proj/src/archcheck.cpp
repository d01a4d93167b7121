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

#include "prosoval/archcheck.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "prosoval/error.hpp"

namespace prosoval {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::baseline: return "baseline";
    case Variant::pre_encoder: return "pre-encoder";
    case Variant::pre_decoder: return "pre-decoder";
    case Variant::intra_decoder: return "intra-decoder";
    case Variant::combo: return "combo";
  }
  return "baseline";
}

Variant variant_from_name(const std::string& name) {
  for (Variant v : all_variants()) {
    if (variant_name(v) == name) {
      return v;
    }
  }
  raise(ErrorCategory::validation, "unknown variant \"" + name + "\"");
}

std::vector<Variant> all_variants() {
  return {Variant::baseline, Variant::pre_encoder, Variant::pre_decoder,
          Variant::intra_decoder, Variant::combo};
}

namespace {

class GraphBuilder {
 public:
  explicit GraphBuilder(const ArchConfig& cfg) : cfg_(cfg) {}

  void input(const std::string& name, int dim) {
    graph_.inputs.push_back({name, dim});
  }

  void output(const std::string& name, int dim, const std::string& producer) {
    graph_.outputs.push_back({name, dim});
    graph_.edges.push_back({producer, name, 0});
  }

  // Adds a single-input layer fed by `from` and returns its name.
  std::string layer(LayerKind kind, const std::string& name, int in_dim,
                    int out_dim, const std::string& from, int kernel = 0) {
    graph_.layers.push_back({name, kind, in_dim, out_dim, kernel});
    graph_.edges.push_back({from, name, 0});
    return name;
  }

  std::string conv(const std::string& name, int in_dim, int out_dim,
                   const std::string& from) {
    return layer(LayerKind::Conv1d, name, in_dim, out_dim, from, cfg_.conv_kernel);
  }

  // Concat declares out_dim = sum of its declared input dims.
  std::string concat(const std::string& name,
                     const std::vector<std::pair<std::string, int>>& sources) {
    int total = 0;
    for (const auto& [src, dim] : sources) {
      total += dim;
    }
    graph_.layers.push_back({name, LayerKind::Concat, total, total, 0});
    int port = 0;
    for (const auto& [src, dim] : sources) {
      graph_.edges.push_back({src, name, port++});
    }
    return name;
  }

  ModuleGraph take() { return std::move(graph_); }

 private:
  ArchConfig cfg_;
  ModuleGraph graph_;
};

// Classifier head: 2 x Bi-LSTM then FFN(256, 2) + Sigmoid. in_dim
// follows the embedding width of the variant. Returns the name of the
// 2-wide output layer.
std::string add_classifier(GraphBuilder& b, const ArchConfig& cfg,
                           int embedding_dim) {
  const int bilstm_out = cfg.classifier_full_hidden ? 512 : 256;
  b.layer(LayerKind::BiRecurrent, "classifier_bilstm_1", embedding_dim,
          bilstm_out, "embedding");
  b.layer(LayerKind::BiRecurrent, "classifier_bilstm_2", bilstm_out,
          bilstm_out, "classifier_bilstm_1");
  b.layer(LayerKind::FullyConnected, "classifier_ffn", 256, 2,
          "classifier_bilstm_2");
  b.layer(LayerKind::Activation, "classifier_sigmoid", 2, 2, "classifier_ffn");
  return "classifier_sigmoid";
}

// Encoder core 3 x Conv(512, 512) + Bi-LSTM(512, 256), then the opaque
// location-sensitive attention producing a 512-wide context.
std::string add_encoder_and_attention(GraphBuilder& b,
                                      const std::string& encoder_input) {
  std::string prev = encoder_input;
  for (int i = 1; i <= 3; ++i) {
    prev = b.conv("encoder_conv_" + std::to_string(i), 512, 512, prev);
  }
  b.layer(LayerKind::BiRecurrent, "encoder_bilstm", 512, 256, prev);
  b.layer(LayerKind::AttentionContext, "attention_context", 256, 512,
          "encoder_bilstm");
  return "attention_context";
}

// Decoder: pre-net, attention RNN pair, mel projection. `context` is
// what gets concatenated with the pre-net output (the raw attention
// context, or context+classifier for pre-decoder conditioning).
std::string add_decoder_front(GraphBuilder& b, const std::string& context,
                              int context_dim) {
  b.input("mel_frame", 80);
  b.layer(LayerKind::FullyConnected, "prenet_ffn_1", 80, 256, "mel_frame");
  b.layer(LayerKind::Activation, "prenet_relu_1", 256, 256, "prenet_ffn_1");
  b.layer(LayerKind::FullyConnected, "prenet_ffn_2", 256, 256, "prenet_relu_1");
  b.layer(LayerKind::Activation, "prenet_relu_2", 256, 256, "prenet_ffn_2");
  b.concat("decoder_concat", {{"prenet_relu_2", 256}, {context, context_dim}});
  b.layer(LayerKind::Recurrent, "attention_rnn_1", 768, 1024, "decoder_concat");
  b.layer(LayerKind::Recurrent, "attention_rnn_2", 1024, 1024, "attention_rnn_1");
  b.layer(LayerKind::FullyConnected, "mel_projection", 1024, 80,
          "attention_rnn_2");
  return "mel_projection";
}

// Baseline post-net: CNN(80,512), 4 x CNN(512,512), CNN(512,80).
std::string add_postnet_baseline(GraphBuilder& b, const std::string& from) {
  std::string prev = b.conv("postnet_conv_1", 80, 512, from);
  for (int i = 2; i <= 5; ++i) {
    prev = b.conv("postnet_conv_" + std::to_string(i), 512, 512, prev);
  }
  return b.conv("postnet_conv_6", 512, 80, prev);
}

// Conditioned post-net: every 510-wide CNN output is concatenated with
// the classifier vector before the next convolution.
std::string add_postnet_intra(GraphBuilder& b, const std::string& from,
                              const std::string& classifier) {
  std::string prev = b.conv("postnet_conv_1", 80, 510, from);
  prev = b.concat("intra_concat_1", {{prev, 510}, {classifier, 2}});
  for (int i = 2; i <= 5; ++i) {
    prev = b.conv("postnet_conv_" + std::to_string(i), 512, 510, prev);
    prev = b.concat("intra_concat_" + std::to_string(i), {{prev, 510}, {classifier, 2}});
  }
  return b.conv("postnet_conv_6", 512, 80, prev);
}

}  // namespace

ModuleGraph build_graph(Variant v, const ArchConfig& cfg) {
  const bool pre_encoder_concat = v == Variant::pre_encoder || v == Variant::combo;
  const bool intra_concat = v == Variant::intra_decoder || v == Variant::combo;
  const bool pre_decoder_concat = v == Variant::pre_decoder;
  const bool has_classifier = v != Variant::baseline;
  // Table 1 narrows the embedding to 510 so that embedding+classifier
  // concatenation restores the encoder's 512-wide input; variants
  // without that concatenation keep the baseline 512.
  const int embedding_dim = pre_encoder_concat ? 510 : 512;

  GraphBuilder b(cfg);
  b.input("text", cfg.vocab);
  b.layer(LayerKind::Embedding, "embedding", cfg.vocab, embedding_dim, "text");

  std::string classifier;
  if (has_classifier) {
    classifier = add_classifier(b, cfg, embedding_dim);
  }

  std::string encoder_input = "embedding";
  if (pre_encoder_concat) {
    encoder_input = b.concat("pre_encoder_concat",
                             {{"embedding", embedding_dim}, {classifier, 2}});
  }
  const std::string context = add_encoder_and_attention(b, encoder_input);

  std::string decoder_context = context;
  int decoder_context_dim = 512;
  if (pre_decoder_concat) {
    decoder_context = b.concat("pre_decoder_concat",
                               {{context, 512}, {classifier, 2}});
    decoder_context_dim = 514;
  }
  const std::string mel = add_decoder_front(b, decoder_context, decoder_context_dim);

  const std::string postnet_out = intra_concat
                                      ? add_postnet_intra(b, mel, classifier)
                                      : add_postnet_baseline(b, mel);
  b.output("mel_out", 80, postnet_out);
  return b.take();
}

ShapeReport propagate_shapes(const ModuleGraph& g, int seq_len) {
  if (seq_len < 1) {
    raise(ErrorCategory::contract, "propagate_shapes: seq_len must be >= 1");
  }
  std::map<std::string, const LayerSpec*> layers;
  for (const LayerSpec& layer : g.layers) {
    if (!layers.emplace(layer.name, &layer).second) {
      raise(ErrorCategory::validation, "duplicate layer name: " + layer.name);
    }
  }
  std::map<std::string, int> produced_dim;
  for (const Port& port : g.inputs) {
    produced_dim[port.name] = port.dim;
  }
  std::set<std::string> output_ports;
  for (const Port& port : g.outputs) {
    output_ports.insert(port.name);
  }

  // Edges grouped per consumer; each (consumer, port) fed exactly once.
  std::map<std::string, std::vector<const GraphEdge*>> in_edges;
  std::map<std::string, int> pending;  // unresolved producers per layer
  for (const LayerSpec& layer : g.layers) {
    pending[layer.name] = 0;
  }
  for (const GraphEdge& edge : g.edges) {
    const bool to_layer = layers.count(edge.consumer) != 0;
    if (!to_layer && output_ports.count(edge.consumer) == 0) {
      raise(ErrorCategory::validation, "edge to unknown consumer: " + edge.consumer);
    }
    if (layers.count(edge.producer) == 0 && produced_dim.count(edge.producer) == 0) {
      raise(ErrorCategory::validation, "edge from unknown producer: " + edge.producer);
    }
    in_edges[edge.consumer].push_back(&edge);
    if (to_layer && layers.count(edge.producer) != 0) {
      ++pending[edge.consumer];
    }
  }
  for (auto& [consumer, edges] : in_edges) {
    std::set<int> ports;
    for (const GraphEdge* edge : edges) {
      if (!ports.insert(edge->port).second) {
        raise(ErrorCategory::validation,
              "port " + std::to_string(edge->port) + " of " + consumer +
                  " fed more than once");
      }
    }
    const int max_port = *ports.rbegin();
    if (static_cast<std::size_t>(max_port) + 1 != edges.size()) {
      raise(ErrorCategory::validation, "gap in input ports of " + consumer);
    }
    const auto it = layers.find(consumer);
    if (it != layers.end()) {
      if (it->second->kind == LayerKind::Concat && edges.size() < 2) {
        raise(ErrorCategory::validation, "Concat " + consumer + " needs >= 2 inputs");
      }
      if (it->second->kind != LayerKind::Concat && edges.size() != 1) {
        raise(ErrorCategory::validation, consumer + " accepts exactly one input");
      }
    }
  }
  for (const LayerSpec& layer : g.layers) {
    if (in_edges.count(layer.name) == 0) {
      raise(ErrorCategory::validation, "layer " + layer.name + " has no input");
    }
  }

  // Kahn's algorithm over layers.
  std::queue<const LayerSpec*> ready;
  for (const LayerSpec& layer : g.layers) {
    if (pending[layer.name] == 0) {
      ready.push(&layer);
    }
  }
  std::map<std::string, std::vector<const LayerSpec*>> consumers_of;
  for (const GraphEdge& edge : g.edges) {
    const auto it = layers.find(edge.consumer);
    if (it != layers.end() && layers.count(edge.producer) != 0) {
      consumers_of[edge.producer].push_back(it->second);
    }
  }

  ShapeReport report;
  std::size_t resolved = 0;
  while (!ready.empty()) {
    const LayerSpec* layer = ready.front();
    ready.pop();
    ++resolved;

    const auto& edges = in_edges[layer->name];
    std::vector<const GraphEdge*> sorted_edges(edges.begin(), edges.end());
    std::sort(sorted_edges.begin(), sorted_edges.end(),
              [](const GraphEdge* a, const GraphEdge* b) { return a->port < b->port; });
    int actual_in = 0;
    for (const GraphEdge* edge : sorted_edges) {
      const auto layer_it = layers.find(edge->producer);
      actual_in += layer_it != layers.end() ? layer_it->second->out_dim
                                            : produced_dim[edge->producer];
    }

    report.layers.push_back({layer->name, layer->in_dim, actual_in, layer->out_dim});
    if (actual_in != layer->in_dim) {
      report.mismatches.push_back({layer->name, layer->in_dim, actual_in});
    }
    for (const LayerSpec* consumer : consumers_of[layer->name]) {
      if (--pending[consumer->name] == 0) {
        ready.push(consumer);
      }
    }
  }
  if (resolved != g.layers.size()) {
    raise(ErrorCategory::validation, "module graph contains a cycle");
  }

  // Output ports checked like declared-width consumers.
  for (const Port& port : g.outputs) {
    const auto it = in_edges.find(port.name);
    if (it == in_edges.end() || it->second.size() != 1) {
      raise(ErrorCategory::validation, "output port " + port.name + " must be fed once");
    }
    const auto layer_it = layers.find(it->second.front()->producer);
    const int actual = layer_it != layers.end()
                           ? layer_it->second->out_dim
                           : produced_dim[it->second.front()->producer];
    if (actual != port.dim) {
      report.mismatches.push_back({port.name, port.dim, actual});
    }
  }

  auto by_name = [](const auto& a, const auto& b) { return a.layer < b.layer; };
  std::sort(report.layers.begin(), report.layers.end(), by_name);
  std::sort(report.mismatches.begin(), report.mismatches.end(), by_name);
  report.param_count = param_count(g);
  return report;
}

long long param_count(const ModuleGraph& g) {
  long long total = 0;
  for (const LayerSpec& layer : g.layers) {
    const long long in = layer.in_dim;
    const long long out = layer.out_dim;
    if (in <= 0 || out <= 0) {
      raise(ErrorCategory::configuration,
            "layer " + layer.name + " has unresolved dimensions");
    }
    switch (layer.kind) {
      case LayerKind::Embedding:
        total += in * out;
        break;
      case LayerKind::FullyConnected:
        total += in * out + out;
        break;
      case LayerKind::Conv1d: {
        if (layer.kernel < 1) {
          raise(ErrorCategory::configuration,
                "conv layer " + layer.name + " has unresolved kernel size");
        }
        total += in * out * layer.kernel + out;
        break;
      }
      case LayerKind::Recurrent: {
        const long long h = out;
        total += 4 * ((in + h) * h + h);
        break;
      }
      case LayerKind::BiRecurrent: {
        if (out % 2 != 0) {
          raise(ErrorCategory::configuration,
                "bidirectional layer " + layer.name + " needs an even output width");
        }
        const long long h = out / 2;
        total += 2 * 4 * ((in + h) * h + h);
        break;
      }
      case LayerKind::Activation:
      case LayerKind::Concat:
      case LayerKind::AttentionContext:
        break;
    }
  }
  return total;
}

CheckResult verify_table1(Variant v, const ArchConfig& cfg) {
  const ModuleGraph graph = build_graph(v, cfg);
  const ShapeReport shapes = propagate_shapes(graph, 100);
  CheckResult result;
  result.variant = v;
  result.mismatches = shapes.mismatches;
  result.pass = shapes.mismatches.empty();
  result.param_count = shapes.param_count;
  result.assumptions = cfg;
  return result;
}

}  // namespace prosoval
