#pragma once

#include <zlib.h>

#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace accensus {

// Line-oriented gzip writer. Deterministic output: fixed compression
// level, no timestamps in the header (zlib's default gzip header carries
// mtime 0 when deflateSetHeader is not used).
class GzLineWriter {
 public:
  explicit GzLineWriter(const std::string& path, int level = 6)
      : path_(path), file_(std::fopen(path.c_str(), "wb")) {
    if (!file_) throw std::runtime_error("cannot open for write: " + path);
    strm_.zalloc = Z_NULL;
    strm_.zfree = Z_NULL;
    strm_.opaque = Z_NULL;
    if (deflateInit2(&strm_, level, Z_DEFLATED, 15 + 16, 8,
                     Z_DEFAULT_STRATEGY) != Z_OK) {
      std::fclose(file_);
      throw std::runtime_error("deflateInit2 failed");
    }
    buf_.resize(1 << 16);
  }

  GzLineWriter(const GzLineWriter&) = delete;
  GzLineWriter& operator=(const GzLineWriter&) = delete;

  ~GzLineWriter() {
    if (file_) {
      try {
        close();
      } catch (...) {
      }
    }
  }

  void write_line(std::string_view line) {
    write(line);
    write("\n");
  }

  void write(std::string_view data) {
    strm_.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    strm_.avail_in = static_cast<uInt>(data.size());
    pump(Z_NO_FLUSH);
  }

  void close() {
    strm_.next_in = Z_NULL;
    strm_.avail_in = 0;
    pump(Z_FINISH);
    deflateEnd(&strm_);
    if (std::fclose(file_) != 0) {
      file_ = nullptr;
      throw std::runtime_error("close failed: " + path_);
    }
    file_ = nullptr;
  }

 private:
  void pump(int flush) {
    do {
      strm_.next_out = buf_.data();
      strm_.avail_out = static_cast<uInt>(buf_.size());
      int rc = deflate(&strm_, flush);
      if (rc == Z_STREAM_ERROR) throw std::runtime_error("deflate failed");
      std::size_t have = buf_.size() - strm_.avail_out;
      if (have && std::fwrite(buf_.data(), 1, have, file_) != have)
        throw std::runtime_error("short write: " + path_);
      if (flush == Z_FINISH && rc == Z_STREAM_END) break;
    } while (strm_.avail_out == 0 || strm_.avail_in > 0);
  }

  std::string path_;
  std::FILE* file_ = nullptr;
  z_stream strm_{};
  std::vector<Bytef> buf_;
};

// Reader for (possibly multi-member) gzip line files.
class GzLineReader {
 public:
  explicit GzLineReader(const std::string& path)
      : file_(std::fopen(path.c_str(), "rb")) {
    if (!file_) throw std::runtime_error("cannot open for read: " + path);
    strm_.zalloc = Z_NULL;
    strm_.zfree = Z_NULL;
    strm_.opaque = Z_NULL;
    if (inflateInit2(&strm_, 15 + 16) != Z_OK) {
      std::fclose(file_);
      throw std::runtime_error("inflateInit2 failed");
    }
    in_.resize(1 << 16);
    out_.resize(1 << 16);
  }

  GzLineReader(const GzLineReader&) = delete;
  GzLineReader& operator=(const GzLineReader&) = delete;

  ~GzLineReader() {
    inflateEnd(&strm_);
    if (file_) std::fclose(file_);
  }

  bool next_line(std::string& line) {
    line.clear();
    while (true) {
      auto nl = pending_.find('\n', scan_pos_);
      if (nl != std::string::npos) {
        line.assign(pending_, 0, nl);
        pending_.erase(0, nl + 1);
        scan_pos_ = 0;
        return true;
      }
      scan_pos_ = pending_.size();
      if (eof_) {
        if (!pending_.empty()) {
          line.swap(pending_);
          pending_.clear();
          scan_pos_ = 0;
          return true;
        }
        return false;
      }
      fill();
    }
  }

 private:
  void fill() {
    if (strm_.avail_in == 0) {
      std::size_t got = std::fread(in_.data(), 1, in_.size(), file_);
      if (got == 0) {
        eof_ = true;
        return;
      }
      strm_.next_in = in_.data();
      strm_.avail_in = static_cast<uInt>(got);
    }
    strm_.next_out = out_.data();
    strm_.avail_out = static_cast<uInt>(out_.size());
    int rc = inflate(&strm_, Z_NO_FLUSH);
    if (rc == Z_STREAM_END) {
      // support concatenated gzip members
      if (inflateReset(&strm_) != Z_OK)
        throw std::runtime_error("inflateReset failed");
    } else if (rc != Z_OK && rc != Z_BUF_ERROR) {
      throw std::runtime_error("inflate failed");
    }
    pending_.append(reinterpret_cast<char*>(out_.data()),
                    out_.size() - strm_.avail_out);
  }

  std::FILE* file_ = nullptr;
  z_stream strm_{};
  std::vector<Bytef> in_, out_;
  std::string pending_;
  std::size_t scan_pos_ = 0;
  bool eof_ = false;
};

}  // namespace accensus
