#pragma once

#include <string>
#include <string_view>

#include "arcllm/decode_result.hpp"
#include "arcllm/object_graph.hpp"

namespace arcllm {

enum class ObjectStyle { Descriptors, Json };

struct ObjectEncodingConfig {
  ObjectStyle style = ObjectStyle::Json;
  bool include_edges = false;

  /// "object-desc", "object-desc-edges", "object-json" or "object-json-edges".
  static ObjectEncodingConfig from_tag(std::string_view tag);
  std::string tag() const;

  friend bool operator==(const ObjectEncodingConfig&, const ObjectEncodingConfig&) = default;
};

/// Descriptors:
///   Grid size: HxW
///   Object 0: color=blue, size=2, coordinates=[(0,0),(0,1)]
///   Edges: (0,1,vertical) ...
/// Json:
///   {"grid_size":[H,W],"objects":[{"id":0,"color":"blue","size":2,"coordinates":[[0,0],[0,1]]}],"edges":[...]}
///
/// Edges are emitted only when `cfg.include_edges`; they are recomputed with
/// build_edges so the text never disagrees with the nodes.
std::string encode_object_text(const ObjectGraph& graph, const ObjectEncodingConfig& cfg,
                               const Palette& palette = Palette::canonical());

/// Finds the last object block of the configured style in `text` and renders it.
/// The block's grid size wins over `fallback_dims` when present.
DecodeResult decode_object_answer(std::string_view text, const ObjectEncodingConfig& cfg, GridDims fallback_dims,
                                  Color background = kBlack, const Palette& palette = Palette::canonical());

}  // namespace arcllm
