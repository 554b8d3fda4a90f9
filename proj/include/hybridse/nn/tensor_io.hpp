// Copyright 2026 The hybridse Authors
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

#ifndef HYBRIDSE_NN_TENSOR_IO_HPP_
#define HYBRIDSE_NN_TENSOR_IO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <string>
#include <vector>

#include "hybridse/error.hpp"
#include "hybridse/nn/matrix.hpp"

namespace hybridse::nn {

// A named view of one parameter array inside a model.
struct ParamRef {
  std::string name;
  std::vector<double>* values;
  std::vector<std::uint64_t> dims;
};

inline void add_param(std::vector<ParamRef>& out, const std::string& name, Matrix& m) {
  out.push_back({name, &m.data, {m.rows, m.cols}});
}
inline void add_param(std::vector<ParamRef>& out, const std::string& name, std::vector<double>& v) {
  out.push_back({name, &v, {v.size()}});
}

struct Tensor {
  std::vector<std::uint64_t> dims;
  std::vector<double> values;
};

// Flat binary tensor archive:
//   magic "HSETENSR" (8 bytes), u32 version, u32 tensor count, then per tensor
//   u32 name length, name bytes, u32 rank, rank x u64 dims, float64 payload.
// All integers and doubles little-endian.
class TensorArchive {
 public:
  static constexpr char kMagic[8] = {'H', 'S', 'E', 'T', 'E', 'N', 'S', 'R'};
  static constexpr std::uint32_t kVersion = 1;

  void put(const std::string& name, Tensor t) { tensors_[name] = std::move(t); }
  const std::map<std::string, Tensor>& tensors() const { return tensors_; }

  const Tensor& get(const std::string& name) const {
    auto it = tensors_.find(name);
    if (it == tensors_.end()) throw FormatError("tensor format: missing tensor '" + name + "'");
    return it->second;
  }

  std::vector<unsigned char> encode() const {
    std::vector<unsigned char> out(kMagic, kMagic + 8);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(tensors_.size()));
    for (const auto& [name, t] : tensors_) {
      put_u32(out, static_cast<std::uint32_t>(name.size()));
      out.insert(out.end(), name.begin(), name.end());
      put_u32(out, static_cast<std::uint32_t>(t.dims.size()));
      for (auto d : t.dims) put_u64(out, d);
      for (double v : t.values) put_u64(out, std::bit_cast<std::uint64_t>(v));
    }
    return out;
  }

  static TensorArchive decode(const std::vector<unsigned char>& bytes, const std::string& source = "<memory>") {
    std::size_t pos = 0;
    auto fail = [&](const std::string& why) -> void {
      throw FormatError("tensor format: " + source + ": " + why);
    };
    auto need = [&](std::size_t n) {
      if (bytes.size() - pos < n) fail("unexpected end of data at byte " + std::to_string(pos));
    };
    auto u32 = [&]() {
      need(4);
      std::uint32_t v = 0;
      for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[pos + i]) << (8 * i);
      pos += 4;
      return v;
    };
    auto u64 = [&]() {
      need(8);
      std::uint64_t v = 0;
      for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[pos + i]) << (8 * i);
      pos += 8;
      return v;
    };
    need(8);
    if (std::memcmp(bytes.data(), kMagic, 8) != 0) fail("bad magic");
    pos = 8;
    const std::uint32_t version = u32();
    if (version != kVersion) fail("unsupported version " + std::to_string(version));
    const std::uint32_t count = u32();
    TensorArchive ar;
    for (std::uint32_t t = 0; t < count; ++t) {
      const std::uint32_t name_len = u32();
      need(name_len);
      std::string name(bytes.begin() + static_cast<long>(pos), bytes.begin() + static_cast<long>(pos + name_len));
      pos += name_len;
      const std::uint32_t rank = u32();
      if (rank > 8) fail("implausible rank " + std::to_string(rank) + " for '" + name + "'");
      Tensor tensor;
      std::uint64_t elems = 1;
      for (std::uint32_t r = 0; r < rank; ++r) {
        tensor.dims.push_back(u64());
        elems *= tensor.dims.back();
      }
      if (elems > (bytes.size() - pos) / 8) fail("payload of '" + name + "' exceeds file size");
      tensor.values.resize(elems);
      for (auto& v : tensor.values) v = std::bit_cast<double>(u64());
      ar.put(name, std::move(tensor));
    }
    if (pos != bytes.size()) fail("trailing bytes after last tensor");
    return ar;
  }

  void save(const std::string& path) const {
    const auto bytes = encode();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("tensor format: cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }

  static TensorArchive load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("tensor format: cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode(bytes, path);
  }

 private:
  static void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  static void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }

  std::map<std::string, Tensor> tensors_;
};

// Models expose `void collect_params(std::vector<ParamRef>&)`.
template <class Model>
TensorArchive to_archive(Model& model) {
  std::vector<ParamRef> refs;
  model.collect_params(refs);
  TensorArchive ar;
  for (const auto& r : refs) ar.put(r.name, Tensor{r.dims, *r.values});
  return ar;
}

template <class Model>
void from_archive(Model& model, const TensorArchive& ar) {
  std::vector<ParamRef> refs;
  model.collect_params(refs);
  for (const auto& r : refs) {
    const Tensor& t = ar.get(r.name);
    if (t.dims != r.dims) {
      throw FormatError("tensor format: shape mismatch for '" + r.name + "'");
    }
    for (double v : t.values) {
      if (!std::isfinite(v)) throw FormatError("tensor format: non-finite values in '" + r.name + "'");
    }
    *r.values = t.values;
  }
  if (ar.tensors().size() != refs.size()) {
    throw FormatError("tensor format: archive holds " + std::to_string(ar.tensors().size()) +
                      " tensors, model expects " + std::to_string(refs.size()));
  }
}

template <class Model>
std::size_t parameter_count(Model& model) {
  std::vector<ParamRef> refs;
  model.collect_params(refs);
  std::size_t n = 0;
  for (const auto& r : refs) n += r.values->size();
  return n;
}

}  // namespace hybridse::nn

#endif  // HYBRIDSE_NN_TENSOR_IO_HPP_
