#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "contextdb/core/meta_value.hpp"
#include "contextdb/store/clock.hpp"
#include "contextdb/store/jsonl_log.hpp"

namespace contextdb {

struct Profile {
  std::string user_id;
  Metadata fields;
  std::int64_t updated_at = 0;  // ms since epoch, strictly increasing per profile

  friend bool operator==(const Profile&, const Profile&) = default;
};

/// User profiles and operational records: read-mostly, occasionally updated.
///
/// Persistence writes the full profile as one JSONL line per change; on
/// reopen the last line per user_id wins. Every field has an equality
/// index, so query_by_field never scans. Writing a value whose type differs
/// from the field's current type succeeds but logs a warning.
class SituationalStore {
 public:
  explicit SituationalStore(const std::filesystem::path& path, Clock clock = system_clock());
  SituationalStore(std::unique_ptr<LogSink> sink, Clock clock);
  ~SituationalStore();

  /// Replaces all fields of the profile.
  Profile put_profile(std::string_view user_id, Metadata fields);
  /// Absent profiles are a normal outcome.
  std::optional<Profile> get_profile(std::string_view user_id) const;
  /// Changes one field. Throws NotFoundError for an unknown user.
  Profile update_field(std::string_view user_id, std::string_view field, MetaValue value);
  /// Profiles whose `field` equals `value` (same type), ordered by user_id.
  std::vector<Profile> query_by_field(std::string_view field, const MetaValue& value) const;

  /// Imports profiles from a JSONL file in the store's own line format
  /// ({"user_id":..,"fields":{..}}; updated_at is ignored). Returns the count.
  std::size_t load_seed(const std::filesystem::path& path);

  std::size_t size() const;

 private:
  Profile write_locked(std::string user_id, Metadata fields);
  void index_add(const Profile& p);
  void index_remove(const Profile& p);

  std::unique_ptr<LogSink> sink_;
  Clock clock_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, Profile, std::less<>> profiles_;
  // field -> value -> user ids
  std::map<std::string, std::map<MetaValue, std::set<std::string>>, std::less<>> indexes_;
};

std::string profile_to_json_line(const Profile& profile);
Profile profile_from_json_line(std::string_view line);

}  // namespace contextdb
