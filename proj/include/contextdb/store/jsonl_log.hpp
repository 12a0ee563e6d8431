#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace contextdb {

/// Durable append-only record log. One record per line.
class LogSink {
 public:
  virtual ~LogSink() = default;

  /// Returns every intact record in file order. A final record that is
  /// unterminated or rejected by `valid` is torn: it is truncated away and
  /// not returned. An invalid record anywhere else throws StorageError.
  virtual std::vector<std::string> recover(
      const std::function<bool(std::string_view)>& valid) = 0;

  /// Appends newline-terminated `lines` in one write. Either all of it
  /// becomes durable or the log is rolled back and StorageError is thrown.
  virtual void append(std::string_view lines) = 0;
};

class JsonlFileLog final : public LogSink {
 public:
  /// Creates the file (and parent directories) if missing.
  explicit JsonlFileLog(std::filesystem::path path, bool sync_each_append = false);
  ~JsonlFileLog() override;
  JsonlFileLog(const JsonlFileLog&) = delete;
  JsonlFileLog& operator=(const JsonlFileLog&) = delete;

  std::vector<std::string> recover(const std::function<bool(std::string_view)>& valid) override;
  void append(std::string_view lines) override;

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  bool sync_;
  int fd_ = -1;
  std::int64_t size_ = 0;
  std::mutex mutex_;
};

}  // namespace contextdb
