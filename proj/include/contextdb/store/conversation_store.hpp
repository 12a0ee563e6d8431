#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "contextdb/core/meta_value.hpp"
#include "contextdb/store/clock.hpp"
#include "contextdb/store/jsonl_log.hpp"

namespace contextdb {

enum class Role { user, assistant, system };

std::string_view role_name(Role role) noexcept;
/// Throws InvalidArgumentError for unknown names.
Role parse_role(std::string_view name);

struct Message {
  std::string session_id;
  std::uint64_t seq = 0;
  Role role = Role::user;
  std::string text;
  std::int64_t timestamp = 0;  // ms since epoch
  Metadata metadata;

  friend bool operator==(const Message&, const Message&) = default;
};

struct MessageDraft {
  Role role = Role::user;
  std::string text;
  Metadata metadata;
};

struct SessionInfo {
  std::string session_id;
  std::size_t message_count = 0;

  friend bool operator==(const SessionInfo&, const SessionInfo&) = default;
};

/// Session-scoped chat history on an append-only JSONL log.
///
/// Each line is one message:
///   {"session_id":..,"seq":..,"role":..,"text":..,"timestamp":..,"metadata":{..}}
/// The store assigns seq (contiguous from 0 per session) and timestamps
/// (non-decreasing per session). Appends to one session are serialized;
/// appends to different sessions only share the log write itself.
class ConversationStore {
 public:
  explicit ConversationStore(const std::filesystem::path& log_path, Clock clock = system_clock());
  /// Replays `sink` to rebuild state.
  ConversationStore(std::unique_ptr<LogSink> sink, Clock clock);
  ~ConversationStore();

  Message append_message(std::string_view session_id, Role role, std::string text,
                         Metadata metadata = {});
  /// Appends consecutive messages with a single durable write: all or none.
  std::vector<Message> append_messages(std::string_view session_id,
                                       std::vector<MessageDraft> drafts);

  /// Last min(last_n, length) messages in ascending seq; empty if unknown.
  std::vector<Message> get_history(std::string_view session_id, std::size_t last_n) const;
  /// Sessions with at least one message, ordered by id.
  std::vector<SessionInfo> list_sessions() const;
  std::size_t message_count() const;

 private:
  struct Session;

  Session& session_for(std::string_view session_id);
  const Session* find_session(std::string_view session_id) const;
  void replay(const std::vector<std::string>& records);

  std::unique_ptr<LogSink> sink_;
  Clock clock_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::unique_ptr<Session>, std::less<>> sessions_;
};

std::string message_to_json_line(const Message& message);
Message message_from_json_line(std::string_view line);

}  // namespace contextdb
