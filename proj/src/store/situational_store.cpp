#include "contextdb/store/situational_store.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>

#include <spdlog/spdlog.h>

#include "contextdb/core/error.hpp"
#include "contextdb/store/meta_json.hpp"

namespace contextdb {

std::string profile_to_json_line(const Profile& p) {
  nlohmann::ordered_json j;
  j["user_id"] = p.user_id;
  j["fields"] = metadata_to_json(p.fields);
  j["updated_at"] = p.updated_at;
  try {
    return j.dump();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgumentError(std::string("profile is not valid UTF-8: ") + e.what());
  }
}

Profile profile_from_json_line(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    Profile p;
    p.user_id = j.at("user_id").get<std::string>();
    if (p.user_id.empty()) throw InvalidArgumentError("empty user_id");
    p.fields = metadata_from_json(j.at("fields"));
    p.updated_at = j.value("updated_at", std::int64_t{0});
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgumentError(std::string("malformed profile record: ") + e.what());
  }
}

SituationalStore::SituationalStore(const std::filesystem::path& path, Clock clock)
    : SituationalStore(std::make_unique<JsonlFileLog>(path), std::move(clock)) {}

SituationalStore::SituationalStore(std::unique_ptr<LogSink> sink, Clock clock)
    : sink_(std::move(sink)), clock_(std::move(clock)) {
  const auto records = sink_->recover([](std::string_view line) {
    try {
      profile_from_json_line(line);
      return true;
    } catch (const Error&) {
      return false;
    }
  });
  for (const auto& line : records) {
    Profile p = profile_from_json_line(line);
    if (const auto it = profiles_.find(p.user_id); it != profiles_.end()) {
      index_remove(it->second);
    }
    index_add(p);
    profiles_[p.user_id] = std::move(p);
  }
}

SituationalStore::~SituationalStore() = default;

void SituationalStore::index_add(const Profile& p) {
  for (const auto& [field, value] : p.fields) {
    auto it = indexes_.find(field);
    if (it == indexes_.end()) it = indexes_.emplace(field, decltype(indexes_)::mapped_type{}).first;
    it->second[value].insert(p.user_id);
  }
}

void SituationalStore::index_remove(const Profile& p) {
  for (const auto& [field, value] : p.fields) {
    const auto idx = indexes_.find(field);
    if (idx == indexes_.end()) continue;
    const auto bucket = idx->second.find(value);
    if (bucket == idx->second.end()) continue;
    bucket->second.erase(p.user_id);
    if (bucket->second.empty()) idx->second.erase(bucket);
  }
}

Profile SituationalStore::write_locked(std::string user_id, Metadata fields) {
  const auto existing = profiles_.find(user_id);
  std::int64_t updated_at = clock_();
  if (existing != profiles_.end()) {
    updated_at = std::max(updated_at, existing->second.updated_at + 1);
    for (const auto& [field, value] : fields) {
      const auto old = existing->second.fields.find(field);
      if (old != existing->second.fields.end() && old->second.type() != value.type()) {
        spdlog::warn("profile '{}': field '{}' changes type from {} to {}", user_id, field,
                     type_name(old->second.type()), type_name(value.type()));
      }
    }
  }

  Profile next{std::move(user_id), std::move(fields), updated_at};
  sink_->append(profile_to_json_line(next) + '\n');

  if (existing != profiles_.end()) {
    index_remove(existing->second);
    existing->second = next;
  } else {
    profiles_.emplace(next.user_id, next);
  }
  index_add(next);
  return next;
}

Profile SituationalStore::put_profile(std::string_view user_id, Metadata fields) {
  if (user_id.empty()) throw InvalidArgumentError("user_id must be nonempty");
  std::unique_lock lock(mutex_);
  return write_locked(std::string(user_id), std::move(fields));
}

std::optional<Profile> SituationalStore::get_profile(std::string_view user_id) const {
  std::shared_lock lock(mutex_);
  const auto it = profiles_.find(user_id);
  if (it == profiles_.end()) return std::nullopt;
  return it->second;
}

Profile SituationalStore::update_field(std::string_view user_id, std::string_view field,
                                       MetaValue value) {
  if (field.empty()) throw InvalidArgumentError("field name must be nonempty");
  std::unique_lock lock(mutex_);
  const auto it = profiles_.find(user_id);
  if (it == profiles_.end()) {
    throw NotFoundError("no profile for user '" + std::string(user_id) + "'");
  }
  Metadata fields = it->second.fields;
  fields.insert_or_assign(std::string(field), std::move(value));
  return write_locked(std::string(user_id), std::move(fields));
}

std::vector<Profile> SituationalStore::query_by_field(std::string_view field,
                                                      const MetaValue& value) const {
  std::shared_lock lock(mutex_);
  std::vector<Profile> out;
  const auto idx = indexes_.find(field);
  if (idx == indexes_.end()) return out;
  const auto bucket = idx->second.find(value);
  if (bucket == idx->second.end()) return out;
  for (const auto& user_id : bucket->second) out.push_back(profiles_.find(user_id)->second);
  return out;
}

std::size_t SituationalStore::load_seed(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw StorageError("cannot open seed profiles '" + path.string() + "'");
  std::vector<Profile> seeds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      seeds.push_back(profile_from_json_line(line));
    } catch (const InvalidArgumentError& e) {
      throw InvalidArgumentError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (auto& p : seeds) put_profile(p.user_id, std::move(p.fields));
  return seeds.size();
}

std::size_t SituationalStore::size() const {
  std::shared_lock lock(mutex_);
  return profiles_.size();
}

}  // namespace contextdb
