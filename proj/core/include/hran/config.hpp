#pragma once
#include <cstdint>
#include <set>
#include <string>

#include "hran/degrade.hpp"
#include "hran/model.hpp"

namespace hran {

struct TrainConfig {
  int batch_size = 64;
  int patch_size = 64;  // LR patch side
  double base_lr = 1e-3;
  int64_t halve_every = 200000;
  int64_t total_iters = 0;  // required, no default
  uint64_t seed = 0;        // required, never wall-clock seeded
  int64_t log_every = 100;
  int64_t val_every = 0;   // 0 disables validation logging
  int64_t ckpt_every = 0;  // 0 writes only the final checkpoint

  void validate() const {
    if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
    if (patch_size < 1) throw ConfigError("train.patch_size must be >= 1");
    if (!(base_lr > 0.0)) throw ConfigError("train.base_lr must be positive");
    if (halve_every < 1) throw ConfigError("train.halve_every must be >= 1");
    if (total_iters < 1) throw ConfigError("train.total_iters must be >= 1 (required key)");
    if (log_every < 1) throw ConfigError("train.log_every must be >= 1");
  }
};

// Everything a run needs, parsed from a line-oriented `key = value` file
// with `#` comments. Unknown keys are errors; there are no silent typos.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  DegradationSpec degradation;
  std::set<std::string> keys_set;  // which keys the file / flags provided

  bool has(const std::string& key) const { return keys_set.count(key) != 0; }

  // Applies one key=value assignment; throws ConfigError on unknown keys or
  // unparseable values.
  void set(const std::string& key, const std::string& value);

  static RunConfig parse_text(const std::string& text);
  static RunConfig parse_file(const std::string& path);
  std::string serialize() const;
};

std::string attention_kind_str(AttentionKind k);
AttentionKind attention_kind_from(const std::string& s);
std::string placement_str(AttentionPlacement p);
AttentionPlacement placement_from(const std::string& s);
std::string degradation_kind_str(DegradationKind k);
DegradationKind degradation_kind_from(const std::string& s);

}  // namespace hran
