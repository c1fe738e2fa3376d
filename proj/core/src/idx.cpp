#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "symlearn/dataset.hpp"
#include "symlearn/errors.hpp"
#include "symlearn/fsio.hpp"

namespace symlearn {
namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;  // unsigned bytes, 3 dims
constexpr std::uint32_t kLabelMagic = 0x00000801;  // unsigned bytes, 1 dim

/// Whole file, gunzipped transparently when compressed (plain files pass
/// through unchanged).
std::vector<unsigned char> read_maybe_gz(const std::string& path) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (f == nullptr) throw IoError("cannot open " + path + " for reading");
    std::vector<unsigned char> out;
    std::vector<unsigned char> chunk(1 << 20);
    for (;;) {
        const int n = gzread(f, chunk.data(), static_cast<unsigned>(chunk.size()));
        if (n < 0) {
            int errnum = 0;
            const char* msg = gzerror(f, &errnum);
            std::string detail = msg != nullptr ? msg : "unknown zlib error";
            gzclose(f);
            throw ParseError("decompression failed for " + path + ": " + detail);
        }
        if (n == 0) break;
        out.insert(out.end(), chunk.begin(), chunk.begin() + n);
    }
    gzclose(f);
    return out;
}

class ByteReader {
public:
    ByteReader(const std::vector<unsigned char>& data, std::string path)
        : data_(data), path_(std::move(path)) {}

    std::uint32_t read_u32_be() {
        need(4, "a 4-byte big-endian integer");
        std::uint32_t v = (static_cast<std::uint32_t>(data_[off_]) << 24) |
                          (static_cast<std::uint32_t>(data_[off_ + 1]) << 16) |
                          (static_cast<std::uint32_t>(data_[off_ + 2]) << 8) |
                          static_cast<std::uint32_t>(data_[off_ + 3]);
        off_ += 4;
        return v;
    }

    const unsigned char* read_bytes(std::size_t n, const char* what) {
        need(n, what);
        const unsigned char* p = data_.data() + off_;
        off_ += n;
        return p;
    }

    std::size_t offset() const { return off_; }
    std::size_t remaining() const { return data_.size() - off_; }

    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(path_ + " at byte offset " + std::to_string(off_) + ": " + message);
    }

private:
    void need(std::size_t n, const char* what) const {
        if (data_.size() - off_ < n) {
            throw ParseError(path_ + " truncated at byte offset " + std::to_string(off_) +
                             ": expected " + std::string(what) + " (" + std::to_string(n) +
                             " bytes) but only " + std::to_string(data_.size() - off_) +
                             " remain");
        }
    }

    const std::vector<unsigned char>& data_;
    std::string path_;
    std::size_t off_ = 0;
};

std::string hex32(std::uint32_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s = "0x";
    for (int shift = 28; shift >= 0; shift -= 4) s += digits[(v >> shift) & 0xF];
    return s;
}

void append_u32_be(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>((v >> 24) & 0xFF));
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>(v & 0xFF));
}

bool has_gz_suffix(const std::string& path) {
    return path.size() >= 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
}

void write_bytes(const std::string& path, const std::string& payload) {
    if (!has_gz_suffix(path)) {
        atomic_write_text(path, payload);
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + target.parent_path().string() +
                              ": " + ec.message());
    }
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(static_cast<unsigned long>(::getpid()));
    gzFile f = gzopen(tmp.c_str(), "wb");
    if (f == nullptr) throw IoError("cannot open " + tmp.string() + " for writing");
    const int written = gzwrite(f, payload.data(), static_cast<unsigned>(payload.size()));
    const int rc = gzclose(f);
    if (written != static_cast<int>(payload.size()) || rc != Z_OK) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw IoError("compressed write failed for " + path);
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code ec2;
        fs::remove(tmp, ec2);
        throw IoError("cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
    }
}

}  // namespace

ImageDataset load_idx(const std::string& images_path, const std::string& labels_path) {
    const std::vector<unsigned char> image_bytes = read_maybe_gz(images_path);
    const std::vector<unsigned char> label_bytes = read_maybe_gz(labels_path);

    ByteReader ir(image_bytes, images_path);
    const std::uint32_t image_magic = ir.read_u32_be();
    if (image_magic != kImageMagic) {
        throw ParseError(images_path + " at byte offset 0: expected image magic " +
                         hex32(kImageMagic) + ", got " + hex32(image_magic));
    }
    const std::uint32_t count = ir.read_u32_be();
    const std::uint32_t rows = ir.read_u32_be();
    const std::uint32_t cols = ir.read_u32_be();
    if (rows == 0 || cols == 0 || rows != cols) {
        ir.fail("image grid is " + std::to_string(rows) + "x" + std::to_string(cols) +
                ", but only square non-empty grids are supported");
    }
    const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
    const unsigned char* image_data =
        ir.read_bytes(static_cast<std::size_t>(count) * pixels, "image pixel data");
    if (ir.remaining() != 0) {
        ir.fail(std::to_string(ir.remaining()) + " trailing bytes after the last image");
    }

    ByteReader lr(label_bytes, labels_path);
    const std::uint32_t label_magic = lr.read_u32_be();
    if (label_magic != kLabelMagic) {
        throw ParseError(labels_path + " at byte offset 0: expected label magic " +
                         hex32(kLabelMagic) + ", got " + hex32(label_magic));
    }
    const std::uint32_t label_count = lr.read_u32_be();
    if (label_count != count) {
        throw ParseError(labels_path + ": holds " + std::to_string(label_count) +
                         " labels but " + images_path + " holds " + std::to_string(count) +
                         " images");
    }
    const unsigned char* label_data = lr.read_bytes(label_count, "label data");
    if (lr.remaining() != 0) {
        lr.fail(std::to_string(lr.remaining()) + " trailing bytes after the last label");
    }

    ImageDataset ds;
    ds.grid_side = rows;
    ds.images = Matrix(count, pixels);
    double* out = ds.images.data();
    for (std::size_t i = 0, n = static_cast<std::size_t>(count) * pixels; i < n; ++i) {
        out[i] = static_cast<double>(image_data[i]) / 255.0;
    }
    ds.labels.resize(count);
    int max_label = -1;
    for (std::size_t i = 0; i < count; ++i) {
        ds.labels[i] = static_cast<int>(label_data[i]);
        max_label = std::max(max_label, ds.labels[i]);
    }
    ds.class_count = max_label + 1;
    validate_dataset(ds);
    return ds;
}

void save_idx(const ImageDataset& ds, const std::string& images_path,
              const std::string& labels_path) {
    validate_dataset(ds);
    const std::size_t pixels = ds.dim();
    std::string image_payload;
    image_payload.reserve(16 + ds.count() * pixels);
    append_u32_be(image_payload, kImageMagic);
    append_u32_be(image_payload, static_cast<std::uint32_t>(ds.count()));
    append_u32_be(image_payload, static_cast<std::uint32_t>(ds.grid_side));
    append_u32_be(image_payload, static_cast<std::uint32_t>(ds.grid_side));
    const double* p = ds.images.data();
    for (std::size_t i = 0, n = ds.count() * pixels; i < n; ++i) {
        const double v = std::clamp(p[i], 0.0, 1.0) * 255.0;
        image_payload.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(v))));
    }

    std::string label_payload;
    label_payload.reserve(8 + ds.count());
    append_u32_be(label_payload, kLabelMagic);
    append_u32_be(label_payload, static_cast<std::uint32_t>(ds.count()));
    for (int label : ds.labels) {
        label_payload.push_back(static_cast<char>(static_cast<unsigned char>(label)));
    }

    write_bytes(images_path, image_payload);
    write_bytes(labels_path, label_payload);
}

}  // namespace symlearn
