// Copyright 2026 The spikekit Authors
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "spikekit/rng.hpp"
#include "spikekit/tensor.hpp"

namespace spikekit {

/// Images as a [N, pixels] tensor with values in [0, 1] plus one label in
/// 0..9 per image.
class Dataset {
 public:
  Dataset(Tensor images, std::vector<std::size_t> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t features() const { return images_.dim(1); }
  const Tensor& images() const noexcept { return images_; }
  const std::vector<std::size_t>& labels() const noexcept { return labels_; }

  /// Copy of the given rows, in order.
  Dataset subset(std::span<const std::size_t> rows) const;

 private:
  Tensor images_;
  std::vector<std::size_t> labels_;
};

/// IDX image file (magic 0x00000803), optionally gzip-compressed. Bytes are
/// scaled by 1/255 and each image flattened row-major.
Tensor load_idx_images(const std::filesystem::path& path);
/// IDX label file (magic 0x00000801), optionally gzip-compressed.
std::vector<std::size_t> load_idx_labels(const std::filesystem::path& path);

enum class Split { train, test };

struct MnistFile {
  std::string name;       // canonical uncompressed name
  std::string sha256;     // digest of the uncompressed payload
};

/// The four canonical files: train images, train labels, test images, test labels.
const std::vector<MnistFile>& mnist_files();

/// Resolves `<dir>/<name>` or `<dir>/<name>.gz`; throws PathError listing
/// the expected file names when neither exists.
std::filesystem::path find_mnist_file(const std::filesystem::path& dir, const std::string& name);

Dataset load_mnist(const std::filesystem::path& dir, Split split);

std::string sha256_hex(std::span<const std::uint8_t> bytes);

struct ChecksumReport {
  std::string name;
  bool present = false;
  bool matches = false;
  std::string digest;
};

/// Digest of the (decompressed) payload of every canonical file present.
std::vector<ChecksumReport> verify_mnist_checksums(const std::filesystem::path& dir);

struct Batch {
  Tensor images;                     // [b, pixels]
  std::vector<std::size_t> labels;   // b entries
};

/// One pass over a dataset in fixed-size batches; the final batch may be
/// smaller. Every sample appears exactly once.
class BatchSequence {
 public:
  BatchSequence(const Dataset& data, std::size_t batch_size, std::vector<std::size_t> order);

  std::size_t size() const noexcept { return count_; }
  Batch operator[](std::size_t i) const;
  std::span<const std::size_t> indices(std::size_t i) const;

 private:
  const Dataset* data_;
  std::size_t batch_size_;
  std::vector<std::size_t> order_;
  std::size_t count_;
};

/// Batches in storage order, or in a seeded permutation when `shuffle`
/// (which then requires `rng`).
BatchSequence batches(const Dataset& data, std::size_t batch_size, Rng* rng, bool shuffle);

}  // namespace spikekit
