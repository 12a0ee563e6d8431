#include "contextdb/store/jsonl_log.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <system_error>

#include "contextdb/core/error.hpp"

namespace contextdb {

namespace {

std::string errno_text() { return std::strerror(errno); }

}  // namespace

JsonlFileLog::JsonlFileLog(std::filesystem::path path, bool sync_each_append)
    : path_(std::move(path)), sync_(sync_each_append) {
  if (path_.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path_.parent_path(), ec);
  }
  fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw StorageError("cannot open log '" + path_.string() + "': " + errno_text());
  struct stat st {};
  if (::fstat(fd_, &st) != 0) {
    ::close(fd_);
    throw StorageError("cannot stat log '" + path_.string() + "': " + errno_text());
  }
  size_ = st.st_size;
}

JsonlFileLog::~JsonlFileLog() {
  if (fd_ >= 0) ::close(fd_);
}

std::vector<std::string> JsonlFileLog::recover(
    const std::function<bool(std::string_view)>& valid) {
  std::lock_guard lock(mutex_);
  std::string content;
  content.resize(static_cast<std::size_t>(size_));
  std::size_t got = 0;
  while (got < content.size()) {
    const ssize_t n = ::pread(fd_, content.data() + got, content.size() - got,
                              static_cast<off_t>(got));
    if (n < 0) throw StorageError("cannot read log '" + path_.string() + "': " + errno_text());
    if (n == 0) break;
    got += static_cast<std::size_t>(n);
  }
  content.resize(got);

  std::vector<std::string> records;
  std::size_t good_end = 0;  // byte offset just past the last intact record
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < content.size()) {
    ++line_no;
    const std::size_t nl = content.find('\n', pos);
    const bool terminated = nl != std::string::npos;
    const std::size_t end = terminated ? nl : content.size();
    const std::string_view line(content.data() + pos, end - pos);
    const bool last = !terminated || end + 1 == content.size();
    if (!line.empty()) {
      if (!terminated || !valid(line)) {
        if (last) break;
        throw StorageError("corrupt record at line " + std::to_string(line_no) + " of '" +
                           path_.string() + "'");
      }
      records.emplace_back(line);
    }
    good_end = end + 1;
    pos = end + 1;
  }

  if (good_end < content.size()) {
    if (::ftruncate(fd_, static_cast<off_t>(good_end)) != 0) {
      throw StorageError("cannot truncate torn tail of '" + path_.string() + "': " + errno_text());
    }
  }
  size_ = static_cast<std::int64_t>(std::min(good_end, content.size()));
  return records;
}

void JsonlFileLog::append(std::string_view lines) {
  std::lock_guard lock(mutex_);
  std::size_t written = 0;
  while (written < lines.size()) {
    const ssize_t n = ::write(fd_, lines.data() + written, lines.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      const std::string reason = errno_text();
      if (::ftruncate(fd_, static_cast<off_t>(size_)) != 0) {
        throw StorageError("append to '" + path_.string() + "' failed (" + reason +
                           ") and rollback failed: " + errno_text());
      }
      throw StorageError("append to '" + path_.string() + "' failed: " + reason);
    }
    written += static_cast<std::size_t>(n);
  }
  if (sync_ && ::fdatasync(fd_) != 0) {
    const std::string reason = errno_text();
    if (::ftruncate(fd_, static_cast<off_t>(size_)) != 0) {
      throw StorageError("fdatasync on '" + path_.string() + "' failed (" + reason +
                         ") and rollback failed: " + errno_text());
    }
    throw StorageError("fdatasync on '" + path_.string() + "' failed: " + reason);
  }
  size_ += static_cast<std::int64_t>(lines.size());
}

}  // namespace contextdb
