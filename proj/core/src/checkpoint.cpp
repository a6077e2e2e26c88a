#include "hran/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace hran {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'H', 'R', 'N', '1'};
constexpr uint32_t kVersion = 1;
constexpr uint8_t kDtypeF32 = 0;

struct Writer {
  std::string buf;

  void raw(const void* p, size_t n) { buf.append(static_cast<const char*>(p), n); }
  void u8(uint8_t v) { raw(&v, 1); }
  void u16(uint16_t v) { raw(&v, 2); }
  void u32(uint32_t v) { raw(&v, 4); }
  void u64(uint64_t v) { raw(&v, 8); }
  void tensor_data(const Tensor4<float>& t) {
    raw(t.data(), static_cast<size_t>(t.numel()) * sizeof(float));
  }
};

struct Reader {
  const std::string& buf;
  size_t pos = 0;

  void raw(void* p, size_t n) {
    if (pos + n > buf.size()) throw ChecksumError("checkpoint truncated");
    std::memcpy(p, buf.data() + pos, n);
    pos += n;
  }
  uint8_t u8() {
    uint8_t v;
    raw(&v, 1);
    return v;
  }
  uint16_t u16() {
    uint16_t v;
    raw(&v, 2);
    return v;
  }
  uint32_t u32() {
    uint32_t v;
    raw(&v, 4);
    return v;
  }
  uint64_t u64() {
    uint64_t v;
    raw(&v, 8);
    return v;
  }
  std::string str(size_t n) {
    if (pos + n > buf.size()) throw ChecksumError("checkpoint truncated");
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
  }
  void tensor_data(Tensor4<float>& t) {
    raw(t.data(), static_cast<size_t>(t.numel()) * sizeof(float));
  }
};

}  // namespace

uint32_t crc32(const uint8_t* data, size_t len) {
  static const auto table = [] {
    std::array<uint32_t, 256> t{};
    for (uint32_t i = 0; i < 256; ++i) {
      uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  uint32_t c = 0xFFFFFFFFu;
  for (size_t i = 0; i < len; ++i) c = table[(c ^ data[i]) & 0xFF] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

void save_checkpoint(const std::string& path, const std::string& config_text,
                     const ParamTable<float>& params, const OptimSnapshot* optim) {
  Writer w;
  w.raw(kMagic, 4);
  w.u32(kVersion);
  w.u64(config_text.size());
  w.raw(config_text.data(), config_text.size());
  w.u32(static_cast<uint32_t>(params.names().size()));
  for (const auto& name : params.names()) {
    const Tensor4<float>& t = params.at(name);
    w.u16(static_cast<uint16_t>(name.size()));
    w.raw(name.data(), name.size());
    w.u8(kDtypeF32);
    const auto& s = t.shape();
    w.u32(static_cast<uint32_t>(s.n));
    w.u32(static_cast<uint32_t>(s.c));
    w.u32(static_cast<uint32_t>(s.h));
    w.u32(static_cast<uint32_t>(s.w));
    w.tensor_data(t);
  }
  w.u8(optim ? 1 : 0);
  if (optim) {
    w.u64(static_cast<uint64_t>(optim->adam_t));
    w.u64(static_cast<uint64_t>(optim->iteration));
    for (const auto& name : params.names()) {
      w.tensor_data(optim->m.at(name));
      w.tensor_data(optim->v.at(name));
    }
  }
  w.u32(crc32(reinterpret_cast<const uint8_t*>(w.buf.data()), w.buf.size()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(w.buf.data(), static_cast<std::streamsize>(w.buf.size()));
  if (!out) throw IoError("failed writing checkpoint " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path);
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (buf.size() < 12) throw ChecksumError("checkpoint truncated: " + path);
  const uint32_t stored_crc =
      *reinterpret_cast<const uint32_t*>(buf.data() + buf.size() - 4);
  const uint32_t actual_crc =
      crc32(reinterpret_cast<const uint8_t*>(buf.data()), buf.size() - 4);
  if (stored_crc != actual_crc) {
    throw ChecksumError("checkpoint checksum mismatch in " + path);
  }

  Reader r{buf};
  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw CheckpointError(path + " is not an HRN1 checkpoint");
  }
  const uint32_t version = r.u32();
  if (version != kVersion) {
    throw VersionError("checkpoint version " + std::to_string(version) + " unsupported (want " +
                       std::to_string(kVersion) + ")");
  }

  LoadedCheckpoint ck;
  ck.config_text = r.str(r.u64());
  ck.config = RunConfig::parse_text(ck.config_text);

  const uint32_t count = r.u32();
  for (uint32_t i = 0; i < count; ++i) {
    const std::string name = r.str(r.u16());
    const uint8_t dtype = r.u8();
    if (dtype != kDtypeF32) {
      throw CheckpointError("tensor " + name + " has unsupported dtype code " +
                            std::to_string(dtype));
    }
    Shape4 s{r.u32(), r.u32(), r.u32(), r.u32()};
    Tensor4<float>& t = ck.params.add(name, s);
    r.tensor_data(t);
  }

  ck.has_optim = r.u8() != 0;
  if (ck.has_optim) {
    ck.optim.adam_t = static_cast<int64_t>(r.u64());
    ck.optim.iteration = static_cast<int64_t>(r.u64());
    for (const auto& name : ck.params.names()) {
      const Shape4 s = ck.params.at(name).shape();
      r.tensor_data(ck.optim.m.add(name, s));
      r.tensor_data(ck.optim.v.add(name, s));
    }
  }
  if (r.pos != buf.size() - 4) {
    throw ChecksumError("checkpoint has trailing bytes: " + path);
  }
  return ck;
}

}  // namespace hran
