#include "ssbe/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "ssbe/errors.hpp"

namespace ssbe {

namespace {

constexpr char kMagic[8] = {'S', 'S', 'B', 'E', 'C', 'K', 'P', 'T'};

template <typename T>
void put(std::vector<unsigned char>& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.insert(out.end(), bytes, bytes + sizeof(T));
}

class Reader {
 public:
  Reader(const std::vector<unsigned char>& buf, std::string path) : buf_(buf), path_(std::move(path)) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > buf_.size()) throw Error("truncated checkpoint: " + path_);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, buf_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
  }

  bool done() const { return pos_ == buf_.size(); }

 private:
  const std::vector<unsigned char>& buf_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const NetworkParams& params, const std::string& path) {
  std::vector<unsigned char> out(kMagic, kMagic + sizeof(kMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, params.activation() == Activation::Tanh ? 0u : 1u);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.layer_sizes().size()));
  for (int s : params.layer_sizes()) put<std::uint32_t>(out, static_cast<std::uint32_t>(s));
  put<std::uint64_t>(out, params.size());
  for (double v : params.data()) put<double>(out, v);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error("failed writing checkpoint " + path);
}

NetworkParams load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("file not found: " + path);
  const std::vector<unsigned char> buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (buf.size() < sizeof(kMagic) || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error("not a checkpoint file: " + path);
  }
  std::vector<unsigned char> body(buf.begin() + sizeof(kMagic), buf.end());
  Reader r(body, path);
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) throw Error("unsupported checkpoint version " + std::to_string(version));
  const auto act = r.get<std::uint32_t>();
  if (act > 1) throw Error("unknown activation code in checkpoint " + path);
  const auto n_layers = r.get<std::uint32_t>();
  if (n_layers < 2 || n_layers > 4096) throw Error("corrupt layer count in checkpoint " + path);
  std::vector<int> sizes;
  for (std::uint32_t i = 0; i < n_layers; ++i) sizes.push_back(static_cast<int>(r.get<std::uint32_t>()));
  NetworkParams params(sizes, act == 0 ? Activation::Tanh : Activation::Relu3Sixth);
  const auto n = r.get<std::uint64_t>();
  if (n != params.size()) throw Error("parameter count does not match architecture in " + path);
  for (double& v : params.data()) v = r.get<double>();
  if (!r.done()) throw Error("trailing bytes in checkpoint " + path);
  return params;
}

}  // namespace ssbe
