#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dermaprep/error.hpp"

namespace dermaprep::arch {

// A layer's spatial arithmetic does not fit its input.
class ShapeError : public Error {
 public:
  ShapeError(int layer_index, const std::string& what)
      : Error(what), layer_index_(layer_index) {}
  int layer_index() const noexcept { return layer_index_; }

 private:
  int layer_index_;
};

struct TensorShape {
  int channels = 0;
  int height = 0;
  int width = 0;
  bool operator==(const TensorShape&) const = default;
  std::string str() const;
};

enum class LayerKind { conv, transconv, maxpool, upconv, upsample };
std::string_view to_string(LayerKind kind);

struct LayerSpec {
  LayerKind kind = LayerKind::conv;
  int out_channels = 0;  // unused for maxpool / upsample
  int kernel = 1;
  int stride = 1;
  int padding = 0;
  int dilation = 1;
  int upsample_factor = 1;  // upconv / upsample only
  std::optional<TensorShape> declared;
  std::optional<std::string> sharing_group;
  int source_line = 0;  // 0 when not parsed from a file

  bool has_weights() const noexcept {
    return kind == LayerKind::conv || kind == LayerKind::transconv || kind == LayerKind::upconv;
  }
};

struct ArchSpec {
  std::string name;
  TensorShape input;
  std::vector<LayerSpec> layers;
  // Set when the network concatenates skip connections; those channel
  // counts are not declared per layer and stay unchecked.
  bool skip_connections = false;
};

// floor((in + 2p - d(k-1) - 1) / s) + 1; also used for pooling.
int infer_conv(int in, int kernel, int stride, int padding, int dilation);
// (in - 1)s - 2p + d(k-1) + 1, output padding 0.
int infer_transconv(int in, int kernel, int stride, int padding, int dilation);
// Nearest upsampling by `factor` followed by a convolution.
int infer_upconv(int in, int factor, int kernel, int stride, int padding, int dilation = 1);

// in*out*k^2 (+ out when `bias`) for weighted layers; 0 otherwise.
std::int64_t param_count(const LayerSpec& layer, int in_channels, bool bias = true);

struct LayerTrace {
  int index = 0;  // 0-based position in the network
  LayerSpec layer;
  TensorShape input;
  TensorShape inferred;
  std::int64_t params = 0;
  bool match = true;  // inferred == declared, or nothing declared
};

struct ShapeTrace {
  std::string network;
  std::vector<LayerTrace> rows;
  bool skip_connections = false;

  std::int64_t total_params() const;
  std::size_t mismatch_count() const;
  bool all_match() const { return mismatch_count() == 0; }
};

struct TraceOptions {
  bool bias = true;
};

// Folds the input shape through the layers. When a layer declares its
// output, that declared shape feeds the next layer, so one inconsistent row
// is reported once instead of cascading. Throws ShapeError if a layer
// collapses its input.
ShapeTrace trace(const ArchSpec& spec, const TraceOptions& opts = {});

struct CouplingViolation {
  std::string group;
  std::string network;
  int layer_index = 0;
  int source_line = 0;
  std::string detail;
};

struct CouplingReport {
  std::vector<std::string> groups;  // sorted tags seen
  std::vector<CouplingViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks that every layer tagged with the same sharing group has an
// identical (kind, in_channels, out_channels, k, s, p, d) signature. The most
// frequent signature in a group is the reference. When `declared_groups` is
// given, any tag outside it is an error (ConfigError).
CouplingReport verify_coupling(std::span<const ArchSpec> specs,
                               const std::vector<std::string>* declared_groups = nullptr,
                               const TraceOptions& opts = {});

// A parsed architecture file: one or more networks plus declared sharing
// groups.
struct ArchFile {
  std::vector<ArchSpec> networks;
  std::vector<std::string> groups;
};

// Throws ParseError with the offending line number.
ArchFile parse_arch(std::string_view text, const std::string& source = "<arch>",
                    const std::string& default_name = "network");
ArchFile load_arch(const std::string& path);

struct VerifyResult {
  std::vector<ShapeTrace> traces;
  std::optional<CouplingReport> coupling;
  // Distinct source rows with a shape mismatch (replicated networks share
  // rows, so a row counts once however many copies it appears in).
  std::size_t mismatched_rows = 0;
  bool ok() const { return mismatched_rows == 0 && (!coupling || coupling->ok()); }
};

VerifyResult verify(const ArchFile& file, const TraceOptions& opts = {});
void print_report(std::ostream& out, const VerifyResult& result);

}  // namespace dermaprep::arch
