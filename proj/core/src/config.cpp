#include "hran/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace hran {

std::string attention_kind_str(AttentionKind k) { return attention_name(k); }

AttentionKind attention_kind_from(const std::string& s) {
  if (s == "lca") return AttentionKind::LCA;
  if (s == "ca") return AttentionKind::CA;
  if (s == "eca") return AttentionKind::ECA;
  if (s == "pa") return AttentionKind::PA;
  if (s == "none") return AttentionKind::None;
  throw ConfigError("unknown attention kind '" + s + "' (expected lca|ca|eca|pa|none)");
}

std::string placement_str(AttentionPlacement p) {
  return p == AttentionPlacement::Parallel ? "parallel" : "in_place";
}

AttentionPlacement placement_from(const std::string& s) {
  if (s == "parallel") return AttentionPlacement::Parallel;
  if (s == "in_place") return AttentionPlacement::InPlace;
  throw ConfigError("unknown attention placement '" + s + "' (expected parallel|in_place)");
}

std::string degradation_kind_str(DegradationKind k) {
  return k == DegradationKind::BI ? "bi" : "bd";
}

DegradationKind degradation_kind_from(const std::string& s) {
  if (s == "bi" || s == "BI") return DegradationKind::BI;
  if (s == "bd" || s == "BD") return DegradationKind::BD;
  throw ConfigError("unknown degradation kind '" + s + "' (expected bi|bd)");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int64_t to_i64(const std::string& key, const std::string& v) {
  int64_t out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw ConfigError("key " + key + ": cannot parse integer from '" + v + "'");
  }
  return out;
}

uint64_t to_u64(const std::string& key, const std::string& v) {
  uint64_t out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw ConfigError("key " + key + ": cannot parse unsigned integer from '" + v + "'");
  }
  return out;
}

double to_f64(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("key " + key + ": cannot parse number from '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("key " + key + ": cannot parse bool from '" + v + "'");
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "model.num_rafgs") {
    model.num_rafgs = static_cast<int>(to_i64(key, value));
  } else if (key == "model.blocks_per_rafg") {
    model.blocks_per_rafg = static_cast<int>(to_i64(key, value));
  } else if (key == "model.channels") {
    model.channels = static_cast<int>(to_i64(key, value));
  } else if (key == "model.scale") {
    model.scale = static_cast<int>(to_i64(key, value));
  } else if (key == "model.attention") {
    model.attention = attention_kind_from(value);
  } else if (key == "model.placement") {
    model.placement = placement_from(value);
  } else if (key == "model.banks") {
    model.banks_enabled = to_bool(key, value);
  } else if (key == "model.ca_reduction") {
    model.ca_reduction = static_cast<int>(to_i64(key, value));
  } else if (key == "model.eca_kernel") {
    model.eca_kernel = static_cast<int>(to_i64(key, value));
  } else if (key == "train.batch_size") {
    train.batch_size = static_cast<int>(to_i64(key, value));
  } else if (key == "train.patch_size") {
    train.patch_size = static_cast<int>(to_i64(key, value));
  } else if (key == "train.base_lr") {
    train.base_lr = to_f64(key, value);
  } else if (key == "train.halve_every") {
    train.halve_every = to_i64(key, value);
  } else if (key == "train.total_iters") {
    train.total_iters = to_i64(key, value);
  } else if (key == "train.seed") {
    train.seed = to_u64(key, value);
  } else if (key == "train.log_every") {
    train.log_every = to_i64(key, value);
  } else if (key == "train.val_every") {
    train.val_every = to_i64(key, value);
  } else if (key == "train.ckpt_every") {
    train.ckpt_every = to_i64(key, value);
  } else if (key == "data.degradation") {
    degradation.kind = degradation_kind_from(value);
  } else if (key == "data.bd_sigma") {
    degradation.bd_sigma = to_f64(key, value);
  } else if (key == "data.bd_kernel") {
    degradation.bd_kernel = static_cast<int>(to_i64(key, value));
  } else if (key == "data.bd_any_scale") {
    degradation.bd_any_scale = to_bool(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
  keys_set.insert(key);
}

RunConfig RunConfig::parse_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value', got '" +
                        line + "'");
    }
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  // degradation scale mirrors the model scale
  cfg.degradation.scale = cfg.model.scale;
  return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

std::string RunConfig::serialize() const {
  std::ostringstream os;
  os.precision(17);
  os << "model.num_rafgs = " << model.num_rafgs << "\n";
  os << "model.blocks_per_rafg = " << model.blocks_per_rafg << "\n";
  os << "model.channels = " << model.channels << "\n";
  os << "model.scale = " << model.scale << "\n";
  os << "model.attention = " << attention_kind_str(model.attention) << "\n";
  os << "model.placement = " << placement_str(model.placement) << "\n";
  os << "model.banks = " << (model.banks_enabled ? "true" : "false") << "\n";
  os << "model.ca_reduction = " << model.ca_reduction << "\n";
  os << "model.eca_kernel = " << model.eca_kernel << "\n";
  os << "train.batch_size = " << train.batch_size << "\n";
  os << "train.patch_size = " << train.patch_size << "\n";
  os << "train.base_lr = " << train.base_lr << "\n";
  os << "train.halve_every = " << train.halve_every << "\n";
  os << "train.total_iters = " << train.total_iters << "\n";
  os << "train.seed = " << train.seed << "\n";
  os << "train.log_every = " << train.log_every << "\n";
  os << "train.val_every = " << train.val_every << "\n";
  os << "train.ckpt_every = " << train.ckpt_every << "\n";
  os << "data.degradation = " << degradation_kind_str(degradation.kind) << "\n";
  os << "data.bd_sigma = " << degradation.bd_sigma << "\n";
  os << "data.bd_kernel = " << degradation.bd_kernel << "\n";
  os << "data.bd_any_scale = " << (degradation.bd_any_scale ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace hran
