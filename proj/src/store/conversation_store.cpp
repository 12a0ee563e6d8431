#include "contextdb/store/conversation_store.hpp"

#include <algorithm>
#include <mutex>

#include "contextdb/core/error.hpp"
#include "contextdb/store/meta_json.hpp"

namespace contextdb {

std::string_view role_name(Role role) noexcept {
  switch (role) {
    case Role::user: return "user";
    case Role::assistant: return "assistant";
    case Role::system: return "system";
  }
  return "unknown";
}

Role parse_role(std::string_view name) {
  if (name == "user") return Role::user;
  if (name == "assistant") return Role::assistant;
  if (name == "system") return Role::system;
  throw InvalidArgumentError("unknown role '" + std::string(name) + "'");
}

std::string message_to_json_line(const Message& m) {
  nlohmann::ordered_json j;
  j["session_id"] = m.session_id;
  j["seq"] = m.seq;
  j["role"] = role_name(m.role);
  j["text"] = m.text;
  j["timestamp"] = m.timestamp;
  j["metadata"] = metadata_to_json(m.metadata);
  try {
    return j.dump();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgumentError(std::string("message is not valid UTF-8: ") + e.what());
  }
}

Message message_from_json_line(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    Message m;
    m.session_id = j.at("session_id").get<std::string>();
    m.seq = j.at("seq").get<std::uint64_t>();
    m.role = parse_role(j.at("role").get<std::string>());
    m.text = j.at("text").get<std::string>();
    m.timestamp = j.at("timestamp").get<std::int64_t>();
    m.metadata = metadata_from_json(j.at("metadata"));
    if (m.session_id.empty()) throw InvalidArgumentError("empty session_id");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgumentError(std::string("malformed message record: ") + e.what());
  }
}

struct ConversationStore::Session {
  mutable std::shared_mutex mutex;
  std::vector<Message> messages;
};

ConversationStore::ConversationStore(const std::filesystem::path& log_path, Clock clock)
    : ConversationStore(std::make_unique<JsonlFileLog>(log_path), std::move(clock)) {}

ConversationStore::ConversationStore(std::unique_ptr<LogSink> sink, Clock clock)
    : sink_(std::move(sink)), clock_(std::move(clock)) {
  const auto records = sink_->recover([](std::string_view line) {
    try {
      message_from_json_line(line);
      return true;
    } catch (const Error&) {
      return false;
    }
  });
  replay(records);
}

ConversationStore::~ConversationStore() = default;

void ConversationStore::replay(const std::vector<std::string>& records) {
  for (const auto& line : records) {
    Message m = message_from_json_line(line);
    auto& session = sessions_[m.session_id];
    if (!session) session = std::make_unique<Session>();
    if (m.seq != session->messages.size()) {
      throw StorageError("conversation log has a sequence gap in session '" + m.session_id +
                         "' at seq " + std::to_string(m.seq));
    }
    session->messages.push_back(std::move(m));
  }
}

ConversationStore::Session& ConversationStore::session_for(std::string_view session_id) {
  {
    std::shared_lock lock(sessions_mutex_);
    const auto it = sessions_.find(session_id);
    if (it != sessions_.end()) return *it->second;
  }
  std::unique_lock lock(sessions_mutex_);
  auto [it, inserted] = sessions_.try_emplace(std::string(session_id));
  if (inserted) it->second = std::make_unique<Session>();
  return *it->second;
}

const ConversationStore::Session* ConversationStore::find_session(
    std::string_view session_id) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(session_id);
  return it == sessions_.end() ? nullptr : it->second.get();
}

Message ConversationStore::append_message(std::string_view session_id, Role role,
                                          std::string text, Metadata metadata) {
  std::vector<MessageDraft> drafts;
  drafts.push_back(MessageDraft{role, std::move(text), std::move(metadata)});
  return append_messages(session_id, std::move(drafts)).front();
}

std::vector<Message> ConversationStore::append_messages(std::string_view session_id,
                                                        std::vector<MessageDraft> drafts) {
  if (session_id.empty()) throw InvalidArgumentError("session_id must be nonempty");
  if (drafts.empty()) return {};

  Session& session = session_for(session_id);
  std::unique_lock lock(session.mutex);

  std::int64_t last_ts = session.messages.empty() ? 0 : session.messages.back().timestamp;
  std::vector<Message> fresh;
  fresh.reserve(drafts.size());
  std::string lines;
  for (auto& draft : drafts) {
    Message m;
    m.session_id = std::string(session_id);
    m.seq = session.messages.size() + fresh.size();
    m.role = draft.role;
    m.text = std::move(draft.text);
    m.timestamp = std::max(clock_(), last_ts);
    m.metadata = std::move(draft.metadata);
    last_ts = m.timestamp;
    lines += message_to_json_line(m);
    lines += '\n';
    fresh.push_back(std::move(m));
  }

  sink_->append(lines);
  session.messages.insert(session.messages.end(), fresh.begin(), fresh.end());
  return fresh;
}

std::vector<Message> ConversationStore::get_history(std::string_view session_id,
                                                    std::size_t last_n) const {
  const Session* session = find_session(session_id);
  if (session == nullptr) return {};
  std::shared_lock lock(session->mutex);
  const auto& all = session->messages;
  const std::size_t n = std::min(last_n, all.size());
  return {all.end() - static_cast<std::ptrdiff_t>(n), all.end()};
}

std::vector<SessionInfo> ConversationStore::list_sessions() const {
  std::shared_lock lock(sessions_mutex_);
  std::vector<SessionInfo> out;
  for (const auto& [id, session] : sessions_) {
    std::shared_lock session_lock(session->mutex);
    if (!session->messages.empty()) out.push_back({id, session->messages.size()});
  }
  return out;
}

std::size_t ConversationStore::message_count() const {
  std::size_t total = 0;
  for (const auto& info : list_sessions()) total += info.message_count;
  return total;
}

}  // namespace contextdb
