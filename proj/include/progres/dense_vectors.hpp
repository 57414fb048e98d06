// Copyright 2026 The progres Authors.
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

#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "progres/csv.hpp"
#include "progres/datamodel.hpp"

namespace progres {

// Row-major float matrix; row index = entity id of one source.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t dim, std::vector<float> data)
      : rows_(rows), dim_(dim), data_(std::move(data)) {
    if (data_.size() != rows_ * dim_)
      throw ValidationError("dense matrix: " + std::to_string(data_.size()) +
                            " values for shape " + std::to_string(rows_) + "x" +
                            std::to_string(dim_));
  }

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }
  std::span<const float> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  const std::vector<float>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> data_;
};

enum class SimFn : std::uint8_t { Euclidean, Cosine };

inline std::string_view to_string(SimFn fn) {
  return fn == SimFn::Euclidean ? "euclidean" : "cosine";
}

// DVEC layout: "DVEC", u32 LE rows, u32 LE dim, rows*dim f32 LE, row-major.
namespace dvec {

inline constexpr std::array<char, 4> kMagic = {'D', 'V', 'E', 'C'};
inline constexpr std::size_t kHeaderBytes = 12;

inline std::uint32_t read_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void put_u32_le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

inline DenseMatrix parse(const std::string& bytes, const std::string& origin = "<memory>") {
  if (bytes.size() < kHeaderBytes)
    throw ValidationError("'" + origin + "': DVEC header truncated");
  if (std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0)
    throw ValidationError("'" + origin + "': bad DVEC magic");
  const auto* u = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t rows = read_u32_le(u + 4);
  const std::uint32_t dim = read_u32_le(u + 8);
  if (dim == 0) throw ValidationError("'" + origin + "': DVEC dimension is 0");
  const std::uint64_t want = static_cast<std::uint64_t>(rows) * dim * 4;
  const std::uint64_t have = bytes.size() - kHeaderBytes;
  if (have < want)
    throw ValidationError("'" + origin + "': DVEC payload truncated (" + std::to_string(have) +
                          " of " + std::to_string(want) + " bytes)");
  if (have > want)
    throw ValidationError("'" + origin + "': DVEC has " + std::to_string(have - want) +
                          " trailing bytes");
  std::vector<float> data(static_cast<std::size_t>(rows) * dim);
  for (std::size_t i = 0; i < data.size(); ++i)
    data[i] = std::bit_cast<float>(read_u32_le(u + kHeaderBytes + 4 * i));
  return DenseMatrix(rows, dim, std::move(data));
}

inline std::string serialize(const DenseMatrix& m) {
  std::string out(kMagic.begin(), kMagic.end());
  put_u32_le(out, static_cast<std::uint32_t>(m.rows()));
  put_u32_le(out, static_cast<std::uint32_t>(m.dim()));
  out.reserve(kHeaderBytes + m.data().size() * 4);
  for (float f : m.data()) put_u32_le(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

}  // namespace dvec

inline DenseMatrix read_dvec(const std::string& path) {
  return dvec::parse(csv::read_file(path), path);
}

inline void write_dvec(const std::string& path, const DenseMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  const auto bytes = dvec::serialize(m);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to '" + path + "'");
}

// Raw similarity, used for ranking: Euclidean 1/(1+|v-w|), Cosine in [-1,1]
// (0 when either vector is zero).
inline double similarity(std::span<const float> v, std::span<const float> w, SimFn fn) {
  if (v.size() != w.size())
    throw ValidationError("dimension mismatch: " + std::to_string(v.size()) + " vs " +
                          std::to_string(w.size()));
  if (fn == SimFn::Euclidean) {
    double sq = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double d = static_cast<double>(v[i]) - w[i];
      sq += d * d;
    }
    return 1.0 / (1.0 + std::sqrt(sq));
  }
  double dot = 0.0, nv = 0.0, nw = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    dot += static_cast<double>(v[i]) * w[i];
    nv += static_cast<double>(v[i]) * v[i];
    nw += static_cast<double>(w[i]) * w[i];
  }
  if (nv == 0.0 || nw == 0.0) return 0.0;
  return dot / (std::sqrt(nv) * std::sqrt(nw));
}

// Pair weights are non-negative; only cosine can go below zero.
inline double stored_weight(double raw) { return raw < 0.0 ? 0.0 : raw; }

}  // namespace progres
