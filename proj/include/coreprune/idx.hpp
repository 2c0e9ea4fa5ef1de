#ifndef COREPRUNE_IDX_HPP
#define COREPRUNE_IDX_HPP

// Reader for the MNIST IDX container (big-endian header, unsigned bytes).
//   images: magic 0x00000803, count, rows, cols, then count*rows*cols bytes
//   labels: magic 0x00000801, count, then count bytes

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "io.hpp"
#include "network.hpp"

namespace coreprune {

inline constexpr std::uint32_t idx_images_magic = 0x00000803;
inline constexpr std::uint32_t idx_labels_magic = 0x00000801;

namespace detail {

inline std::uint32_t read_be32(std::string_view bytes, std::size_t offset) {
    const auto b = [&](std::size_t i) {
        return static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset + i]));
    };
    return (b(0) << 24) | (b(1) << 16) | (b(2) << 8) | b(3);
}

inline std::string hex32(std::uint32_t v) {
    char buf[11];
    std::snprintf(buf, sizeof buf, "0x%08X", static_cast<unsigned>(v));
    return buf;
}

inline void put_be32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>((v >> 24) & 0xFF));
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>(v & 0xFF));
}

inline std::string read_idx_file(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw malformed_idx(path.string() + ": file not found");
    return read_file(path);
}

}  // namespace detail

/// Parsed image and label files; pixels are scaled to [0,1] and flattened.
inline dataset parse_idx(std::string_view images, std::string_view labels,
                         std::string_view images_name = "images",
                         std::string_view labels_name = "labels") {
    const std::string iname(images_name), lname(labels_name);
    if (images.size() < 16) throw malformed_idx(iname + ": truncated header");
    if (labels.size() < 8) throw malformed_idx(lname + ": truncated header");
    const auto imagic = detail::read_be32(images, 0);
    if (imagic != idx_images_magic)
        throw malformed_idx(iname + ": bad magic " + detail::hex32(imagic) + " (expected 0x00000803)");
    const auto lmagic = detail::read_be32(labels, 0);
    if (lmagic != idx_labels_magic)
        throw malformed_idx(lname + ": bad magic " + detail::hex32(lmagic) + " (expected 0x00000801)");

    const std::size_t count = detail::read_be32(images, 4);
    const std::size_t rows = detail::read_be32(images, 8);
    const std::size_t cols = detail::read_be32(images, 12);
    const std::size_t label_count = detail::read_be32(labels, 4);
    if (count != label_count)
        throw malformed_idx("image count " + std::to_string(count) + " != label count " +
                            std::to_string(label_count));
    const std::size_t dim = rows * cols;
    if (dim == 0) throw malformed_idx(iname + ": zero-sized images");
    if (images.size() - 16 < count * dim)
        throw malformed_idx(iname + ": truncated payload, expected " + std::to_string(count * dim) +
                            " pixel bytes, found " + std::to_string(images.size() - 16));
    if (labels.size() - 8 < count)
        throw malformed_idx(lname + ": truncated payload, expected " + std::to_string(count) +
                            " label bytes, found " + std::to_string(labels.size() - 8));

    dataset out;
    out.inputs.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(count));
    out.labels.resize(count);
    int max_label = 0;
    for (std::size_t s = 0; s < count; ++s) {
        const auto* px = reinterpret_cast<const unsigned char*>(images.data() + 16 + s * dim);
        for (std::size_t i = 0; i < dim; ++i)
            out.inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s)) = px[i] / 255.0;
        out.labels[s] = static_cast<unsigned char>(labels[8 + s]);
        max_label = std::max(max_label, out.labels[s]);
    }
    out.classes = std::max(10, max_label + 1);
    return out;
}

inline dataset load_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path) {
    const auto images = detail::read_idx_file(images_path);
    const auto labels = detail::read_idx_file(labels_path);
    return parse_idx(images, labels, images_path.string(), labels_path.string());
}

/// The four standard MNIST file names inside one directory.
struct mnist_layout {
    std::filesystem::path train_images, train_labels, test_images, test_labels;

    explicit mnist_layout(const std::filesystem::path& dir)
        : train_images(dir / "train-images-idx3-ubyte"),
          train_labels(dir / "train-labels-idx1-ubyte"),
          test_images(dir / "t10k-images-idx3-ubyte"),
          test_labels(dir / "t10k-labels-idx1-ubyte") {}

    std::array<std::filesystem::path, 4> files() const {
        return {train_images, train_labels, test_images, test_labels};
    }
    bool complete() const {
        for (const auto& f : files())
            if (!std::filesystem::is_regular_file(f)) return false;
        return true;
    }
};

/// Encodes raw bytes as IDX image/label files (used to build fixtures).
inline std::string encode_idx_images(const std::vector<unsigned char>& pixels, std::uint32_t count,
                                     std::uint32_t rows, std::uint32_t cols) {
    std::string out;
    detail::put_be32(out, idx_images_magic);
    detail::put_be32(out, count);
    detail::put_be32(out, rows);
    detail::put_be32(out, cols);
    out.append(reinterpret_cast<const char*>(pixels.data()), pixels.size());
    return out;
}

inline std::string encode_idx_labels(const std::vector<unsigned char>& labels) {
    std::string out;
    detail::put_be32(out, idx_labels_magic);
    detail::put_be32(out, static_cast<std::uint32_t>(labels.size()));
    out.append(reinterpret_cast<const char*>(labels.data()), labels.size());
    return out;
}

}  // namespace coreprune

#endif  // COREPRUNE_IDX_HPP
