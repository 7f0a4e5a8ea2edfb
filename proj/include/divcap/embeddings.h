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

#ifndef DIVCAP_EMBEDDINGS_H_
#define DIVCAP_EMBEDDINGS_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace divcap {

// Id-indexed rows of 32-bit floats. Ids are unique; when `normalized()` holds,
// every row has unit L2 norm (within 1e-6).
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  bool normalized() const { return normalized_; }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(std::size_t row) const { return ids_[row]; }

  std::span<const float> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

  // Throws Error(kDimMismatch) or Error(kInvalidArgument) on a duplicate id.
  void Add(const std::string& id, std::span<const float> values);
  void Add(const std::string& id, std::span<const double> values);

  std::optional<std::size_t> Find(const std::string& id) const;

  // Scales every row to unit norm. All-zero rows are left as they are and the
  // table is then not marked normalized.
  void Normalize();

  // Marks the table normalized after checking every row; throws
  // Error(kInvariantViolation) otherwise.
  void MarkNormalized();

  bool operator==(const EmbeddingTable& other) const;

 private:
  std::size_t dim_ = 0;
  bool normalized_ = false;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline constexpr char kDvecMagic[4] = {'D', 'V', 'E', 'C'};
inline constexpr std::uint8_t kDvecVersion = 1;

// Binary layout, all integers little-endian:
//   "DVEC" | version u8 | flags u8 (bit0 = normalized) | dim u32 | count u32
//   then per row: id_len u16 | id bytes | dim x f32
void WriteDvec(const EmbeddingTable& table, std::ostream& out);
// Reads one table. Throws Error(kBadMagic), Error(kTruncatedFile) or
// Error(kDimMismatch).
EmbeddingTable ReadDvec(std::istream& in);

void SaveDvec(const EmbeddingTable& table, const std::string& path);

// Loads DVEC, or JSONL lines of {"id": ..., "vec": [...]} when the file starts
// with '{'.
EmbeddingTable LoadEmbeddings(const std::string& path);

EmbeddingTable ReadEmbeddingsJsonl(std::istream& in);

}  // namespace divcap

#endif  // DIVCAP_EMBEDDINGS_H_
