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

#include "spikekit/data.hpp"

#include <openssl/evp.h>
#include <zlib.h>

#include <algorithm>
#include <cstdio>
#include <memory>
#include <numeric>
#include <sstream>

#include "spikekit/error.hpp"

namespace spikekit {
namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

// gzread passes uncompressed files through unchanged.
std::vector<std::uint8_t> read_payload(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw PathError("no such file: " + path.string());
  std::unique_ptr<gzFile_s, int (*)(gzFile)> file(gzopen(path.c_str(), "rb"), gzclose);
  if (!file) throw PathError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes;
  std::uint8_t chunk[1 << 16];
  for (;;) {
    const int got = gzread(file.get(), chunk, sizeof chunk);
    if (got < 0) throw FormatError("corrupt compressed stream in " + path.string());
    if (got == 0) break;
    bytes.insert(bytes.end(), chunk, chunk + got);
  }
  return bytes;
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t at,
                        const std::filesystem::path& path) {
  if (bytes.size() < at + 4) {
    throw FormatError("truncated IDX header in " + path.string());
  }
  return (std::uint32_t{bytes[at]} << 24) | (std::uint32_t{bytes[at + 1]} << 16) |
         (std::uint32_t{bytes[at + 2]} << 8) | std::uint32_t{bytes[at + 3]};
}

std::string hex32(std::uint32_t v) {
  char buf[11];
  std::snprintf(buf, sizeof buf, "0x%08x", v);
  return buf;
}

void check_magic(std::uint32_t seen, std::uint32_t want, const std::filesystem::path& path) {
  if (seen != want) {
    throw FormatError("bad IDX magic in " + path.string() + ": expected " + hex32(want) +
                      ", found " + hex32(seen));
  }
}

void check_length(std::size_t have, std::size_t need, const std::filesystem::path& path) {
  if (have < need) {
    throw FormatError("truncated IDX payload in " + path.string() + ": expected " +
                      std::to_string(need) + " bytes, found " + std::to_string(have));
  }
}

}  // namespace

Dataset::Dataset(Tensor images, std::vector<std::size_t> labels)
    : images_(std::move(images)), labels_(std::move(labels)) {
  if (images_.rank() != 2) {
    throw DimensionError("dataset images must be [N, pixels], got " +
                         shape_string(images_.shape()));
  }
  if (images_.dim(0) != labels_.size()) {
    throw ContractError("dataset has " + std::to_string(images_.dim(0)) + " images but " +
                        std::to_string(labels_.size()) + " labels");
  }
  for (double v : images_.data()) {
    if (!(v >= 0.0 && v <= 1.0)) throw RangeError("dataset pixel outside [0, 1]");
  }
  for (auto l : labels_) {
    if (l > 9) throw RangeError("dataset label " + std::to_string(l) + " outside 0..9");
  }
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  const std::size_t width = features();
  std::vector<double> pixels;
  pixels.reserve(rows.size() * width);
  std::vector<std::size_t> labels;
  labels.reserve(rows.size());
  for (auto r : rows) {
    const auto begin = images_.data().begin() + static_cast<std::ptrdiff_t>(r * width);
    pixels.insert(pixels.end(), begin, begin + static_cast<std::ptrdiff_t>(width));
    labels.push_back(labels_.at(r));
  }
  return Dataset(Tensor({rows.size(), width}, std::move(pixels)), std::move(labels));
}

Tensor load_idx_images(const std::filesystem::path& path) {
  const auto bytes = read_payload(path);
  check_magic(read_be32(bytes, 0, path), kImageMagic, path);
  const std::size_t n = read_be32(bytes, 4, path);
  const std::size_t rows = read_be32(bytes, 8, path);
  const std::size_t cols = read_be32(bytes, 12, path);
  const std::size_t pixels = rows * cols;
  check_length(bytes.size(), 16 + n * pixels, path);
  if (n == 0 || pixels == 0) throw FormatError("IDX image file " + path.string() + " is empty");
  std::vector<double> data(n * pixels);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = bytes[16 + i] / 255.0;
  return Tensor({n, pixels}, std::move(data));
}

std::vector<std::size_t> load_idx_labels(const std::filesystem::path& path) {
  const auto bytes = read_payload(path);
  check_magic(read_be32(bytes, 0, path), kLabelMagic, path);
  const std::size_t n = read_be32(bytes, 4, path);
  check_length(bytes.size(), 8 + n, path);
  std::vector<std::size_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = bytes[8 + i];
    if (v > 9) {
      throw FormatError("label byte " + std::to_string(v) + " at index " + std::to_string(i) +
                        " in " + path.string() + " is outside 0..9");
    }
    labels[i] = v;
  }
  return labels;
}

const std::vector<MnistFile>& mnist_files() {
  static const std::vector<MnistFile> files = {
      {"train-images-idx3-ubyte", "ba891046e6505d7aadcbbe25680a0738ad16aec93bde7f9b65e87a2fc25776db"},
      {"train-labels-idx1-ubyte", "65a50cbbf4e906d70832878ad85ccda5333a97f0f4c3dd2ef09a8a9eef7101c5"},
      {"t10k-images-idx3-ubyte", "0fa7898d509279e482958e8ce81c8e77db3f2f8254e26661ceb7762c4d494ce7"},
      {"t10k-labels-idx1-ubyte", "ff7bcfd416de33731a308c3f266cc351222c34898ecbeaf847f06e48f7ec33f2"},
  };
  return files;
}

std::filesystem::path find_mnist_file(const std::filesystem::path& dir, const std::string& name) {
  for (const auto& candidate : {dir / name, dir / (name + ".gz")}) {
    if (std::filesystem::exists(candidate)) return candidate;
  }
  std::ostringstream msg;
  msg << "missing MNIST file " << name << " in " << dir.string() << " (expected:";
  for (const auto& f : mnist_files()) msg << ' ' << f.name << "[.gz]";
  msg << ')';
  throw PathError(msg.str());
}

Dataset load_mnist(const std::filesystem::path& dir, Split split) {
  const auto& files = mnist_files();
  const std::size_t first = split == Split::train ? 0 : 2;
  auto images = load_idx_images(find_mnist_file(dir, files[first].name));
  auto labels = load_idx_labels(find_mnist_file(dir, files[first + 1].name));
  return Dataset(std::move(images), std::move(labels));
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::vector<ChecksumReport> verify_mnist_checksums(const std::filesystem::path& dir) {
  std::vector<ChecksumReport> reports;
  for (const auto& f : mnist_files()) {
    ChecksumReport r;
    r.name = f.name;
    try {
      const auto path = find_mnist_file(dir, f.name);
      r.present = true;
      r.digest = sha256_hex(read_payload(path));
      r.matches = r.digest == f.sha256;
    } catch (const PathError&) {
      r.present = false;
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

// ---------------------------------------------------------------------------

BatchSequence::BatchSequence(const Dataset& data, std::size_t batch_size,
                             std::vector<std::size_t> order)
    : data_(&data), batch_size_(batch_size), order_(std::move(order)) {
  if (batch_size_ == 0) throw RangeError("batch size must be >= 1");
  count_ = (order_.size() + batch_size_ - 1) / batch_size_;
}

std::span<const std::size_t> BatchSequence::indices(std::size_t i) const {
  if (i >= count_) throw RangeError("batch index out of range");
  const std::size_t begin = i * batch_size_;
  const std::size_t end = std::min(order_.size(), begin + batch_size_);
  return std::span<const std::size_t>(order_).subspan(begin, end - begin);
}

Batch BatchSequence::operator[](std::size_t i) const {
  const auto rows = indices(i);
  const std::size_t width = data_->features();
  std::vector<double> pixels(rows.size() * width);
  std::vector<std::size_t> labels(rows.size());
  const double* src = data_->images().raw();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::copy_n(src + rows[r] * width, width, pixels.begin() + static_cast<std::ptrdiff_t>(r * width));
    labels[r] = data_->labels()[rows[r]];
  }
  return {Tensor({rows.size(), width}, std::move(pixels)), std::move(labels)};
}

BatchSequence batches(const Dataset& data, std::size_t batch_size, Rng* rng, bool shuffle) {
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (shuffle) {
    if (rng == nullptr) throw ContractError("shuffled batches need an rng");
    rng->shuffle(std::span<std::size_t>(order));
  }
  return BatchSequence(data, batch_size, std::move(order));
}

}  // namespace spikekit
