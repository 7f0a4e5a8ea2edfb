//
// Copyright 2026 The divcap Authors
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
//

#include "divcap/embeddings.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "divcap/error.h"
#include "divcap/text.h"
#include "json.hpp"

namespace divcap {
namespace {

constexpr double kUnitTolerance = 1e-6;

double RowNorm(std::span<const float> row) {
  double sum = 0.0;
  for (float v : row) sum += static_cast<double>(v) * static_cast<double>(v);
  return std::sqrt(sum);
}

void PutU16(std::ostream& out, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  out.write(b, 2);
}

void PutU32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int k = 0; k < 4; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xff);
  out.write(b, 4);
}

void ReadExact(std::istream& in, char* dst, std::size_t n) {
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw Error(ErrorCode::kTruncatedFile, "DVEC data ends early");
  }
}

std::uint32_t GetU32(std::istream& in) {
  unsigned char b[4];
  ReadExact(in, reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint16_t GetU16(std::istream& in) {
  unsigned char b[2];
  ReadExact(in, reinterpret_cast<char*>(b), 2);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

}  // namespace

void EmbeddingTable::Add(const std::string& id, std::span<const float> values) {
  if (values.size() != dim_) {
    throw Error(ErrorCode::kDimMismatch, id,
                "row '" + id + "' has " + std::to_string(values.size()) +
                    " values, table dim is " + std::to_string(dim_));
  }
  if (!index_.emplace(id, ids_.size()).second) {
    throw Error(ErrorCode::kInvalidArgument, id, "duplicate id '" + id + "'");
  }
  ids_.push_back(id);
  data_.insert(data_.end(), values.begin(), values.end());
  if (normalized_ && std::abs(RowNorm(values) - 1.0) > kUnitTolerance) {
    normalized_ = false;
  }
}

void EmbeddingTable::Add(const std::string& id,
                         std::span<const double> values) {
  std::vector<float> narrowed(values.begin(), values.end());
  Add(id, std::span<const float>(narrowed));
}

std::optional<std::size_t> EmbeddingTable::Find(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void EmbeddingTable::Normalize() {
  bool all_unit = true;
  for (std::size_t i = 0; i < size(); ++i) {
    float* row = data_.data() + i * dim_;
    const double norm = RowNorm({row, dim_});
    if (norm == 0.0) {
      all_unit = false;
      continue;
    }
    for (std::size_t k = 0; k < dim_; ++k) {
      row[k] = static_cast<float>(static_cast<double>(row[k]) / norm);
    }
  }
  normalized_ = all_unit;
}

void EmbeddingTable::MarkNormalized() {
  for (std::size_t i = 0; i < size(); ++i) {
    if (std::abs(RowNorm(row(i)) - 1.0) > kUnitTolerance) {
      throw Error(ErrorCode::kInvariantViolation, ids_[i],
                  "row '" + ids_[i] + "' is not unit norm");
    }
  }
  normalized_ = true;
}

bool EmbeddingTable::operator==(const EmbeddingTable& other) const {
  if (dim_ != other.dim_ || normalized_ != other.normalized_ ||
      ids_ != other.ids_ || data_.size() != other.data_.size()) {
    return false;
  }
  // Bitwise, so that NaN payloads and signed zeros count.
  return std::memcmp(data_.data(), other.data_.data(),
                     data_.size() * sizeof(float)) == 0;
}

void WriteDvec(const EmbeddingTable& table, std::ostream& out) {
  out.write(kDvecMagic, 4);
  out.put(static_cast<char>(kDvecVersion));
  out.put(static_cast<char>(table.normalized() ? 1 : 0));
  PutU32(out, static_cast<std::uint32_t>(table.dim()));
  PutU32(out, static_cast<std::uint32_t>(table.size()));
  for (std::size_t i = 0; i < table.size(); ++i) {
    const std::string& id = table.id(i);
    if (id.size() > 0xffff) {
      throw Error(ErrorCode::kInvalidArgument, id, "id longer than 65535 bytes");
    }
    PutU16(out, static_cast<std::uint16_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
    for (float v : table.row(i)) PutU32(out, std::bit_cast<std::uint32_t>(v));
  }
}

EmbeddingTable ReadDvec(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kDvecMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "not a DVEC file");
  }
  char header[2];
  ReadExact(in, header, 2);
  if (static_cast<std::uint8_t>(header[0]) != kDvecVersion) {
    throw Error(ErrorCode::kBadMagic, "unsupported DVEC version " +
                                          std::to_string(header[0]));
  }
  const bool normalized = (header[1] & 1) != 0;
  const std::uint32_t dim = GetU32(in);
  const std::uint32_t count = GetU32(in);
  EmbeddingTable table(dim);
  std::vector<float> row(dim);
  std::vector<unsigned char> raw(static_cast<std::size_t>(dim) * 4);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string id(GetU16(in), '\0');
    ReadExact(in, id.data(), id.size());
    ReadExact(in, reinterpret_cast<char*>(raw.data()), raw.size());
    for (std::uint32_t k = 0; k < dim; ++k) {
      const unsigned char* b = raw.data() + 4 * k;
      const std::uint32_t bits = static_cast<std::uint32_t>(b[0]) |
                                 (static_cast<std::uint32_t>(b[1]) << 8) |
                                 (static_cast<std::uint32_t>(b[2]) << 16) |
                                 (static_cast<std::uint32_t>(b[3]) << 24);
      row[k] = std::bit_cast<float>(bits);
    }
    table.Add(id, std::span<const float>(row));
  }
  if (normalized) table.MarkNormalized();
  return table;
}

void SaveDvec(const EmbeddingTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, path, "cannot write " + path);
  WriteDvec(table, out);
}

EmbeddingTable ReadEmbeddingsJsonl(std::istream& in) {
  std::optional<EmbeddingTable> table;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (Trim(line).empty()) continue;
    std::string id;
    std::vector<double> vec;
    try {
      auto obj = nlohmann::json::parse(line);
      id = obj.at("id").get<std::string>();
      vec = obj.at("vec").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kMalformedLine, std::to_string(number),
                  "embedding line " + std::to_string(number) + ": " + e.what());
    }
    if (!table) table.emplace(vec.size());
    table->Add(id, std::span<const double>(vec));
  }
  return table ? std::move(*table) : EmbeddingTable();
}

EmbeddingTable LoadEmbeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, path, "cannot open " + path);
  if (in.peek() == '{') return ReadEmbeddingsJsonl(in);
  return ReadDvec(in);
}

}  // namespace divcap
