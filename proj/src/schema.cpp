#include "phenollm/schema.hpp"

#include <unordered_set>

#include "phenollm/errors.hpp"

namespace phenollm {

FeatureSchema::FeatureSchema(std::string name, std::vector<FeatureColumn> columns)
    : name_(std::move(name)), columns_(std::move(columns)) {
  if (columns_.empty()) throw InvalidSpec("schema '" + name_ + "' has no columns");
  std::unordered_set<std::string> raw, display, header;
  for (const auto& c : columns_) {
    if (c.raw_name.empty() || c.display_name.empty() || c.header_name.empty()) {
      throw InvalidSpec("schema '" + name_ + "' has a column with empty names");
    }
    if (!raw.insert(c.raw_name).second)
      throw InvalidSpec("duplicate raw name: " + c.raw_name);
    if (!display.insert(c.display_name).second)
      throw InvalidSpec("duplicate display name: " + c.display_name);
    if (!header.insert(c.header_name).second)
      throw InvalidSpec("duplicate header name: " + c.header_name);
  }
}

std::optional<std::size_t> FeatureSchema::index_of_raw(const std::string& raw) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].raw_name == raw) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> FeatureSchema::index_of_header(
    const std::string& header) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].header_name == header) return i;
  }
  return std::nullopt;
}

const SchemaPtr& globem_schema() {
  static const SchemaPtr schema = std::make_shared<const FeatureSchema>(
      "globem_daily",
      std::vector<FeatureColumn>{
          {"f_loc:phone_locations_doryab_totaldistance:allday",
           "total distance traveled (meters)", "total_distance_traveled(meters)",
           "meters",
           "This represents the total distance traveled as measured by the GPS "
           "in the participant's smartphone. This includes walking, driving, "
           "and any other modes of transportation.",
           -1,
           {"distance", "traveled", "travelled", "travel", "gps", "movement"}},
          {"f_loc:phone_locations_doryab_timeathome:allday",
           "time spent at home (minutes)", "time_at_home(minutes)", "minutes",
           "This is the total time that the participant was at home as "
           "determined by their smartphone GPS.",
           -1,
           {"home"}},
          {"f_loc:phone_locations_doryab_locationentropy:allday",
           "location entropy", "location_entropy", "",
           "This measures how spread out the participant's time was across "
           "the distinct places they visited. Higher values mean time was "
           "split across more locations, while 0 means the whole day was "
           "spent in one place.",
           2,
           {"entropy", "location", "locations"}},
          {"f_screen:phone_screen_rapids_sumdurationunlock:allday",
           "phone screen time (minutes)", "phone_screen_time(minutes)",
           "minutes",
           "This is the total time that the participant's phone was unlocked "
           "and the screen was in use over the day.",
           -1,
           {"screen", "usage", "use"}},
          {"f_screen:phone_screen_rapids_avgdurationunlock:allday",
           "average phone unlock duration (minutes)",
           "average_phone_unlock_duration(minutes)", "minutes",
           "This is the average length of a single phone unlock session on "
           "that day.",
           -1,
           {"unlock", "unlocks", "session", "sessions"}},
          {"f_call:phone_calls_rapids_incoming_sumduration:allday",
           "phone call incoming duration (minutes)",
           "phone_call_incoming_duration(minutes)", "minutes",
           "This is the total time the participant spent on incoming phone "
           "calls.",
           -1,
           {"incoming", "call", "calls"}},
          {"f_call:phone_calls_rapids_outgoing_sumduration:allday",
           "phone call outgoing duration (minutes)",
           "phone_call_outgoing_duration(minutes)", "minutes",
           "This is the total time the participant spent on outgoing phone "
           "calls.",
           -1,
           {"outgoing", "call", "calls"}},
          {"f_blue:phone_bluetooth_doryab_uniquedevicesothers:allday",
           "unique Bluetooth devices discovered nearby",
           "unique_bluetooth_devices_discovered_nearby", "",
           "This is the number of distinct Bluetooth devices detected near "
           "the participant's phone, a rough measure of how many other "
           "people or devices were around.",
           -1,
           {"bluetooth", "device", "devices"}},
          {"f_steps:fitbit_steps_intraday_rapids_sumsteps:allday",
           "step count", "step_count", "",
           "This is the total number of steps taken as measured by the "
           "fitness tracking smartwatch.",
           -1,
           {"step", "steps", "walked"}},
          {"f_steps:fitbit_steps_intraday_rapids_countepisodesedentarybout:allday",
           "number of sedentary episodes", "number_of_sedentary_episodes", "",
           "This is the number of separate stretches during which the "
           "participant remained sedentary.",
           -1,
           {"sedentary", "episode", "episodes"}},
          {"f_steps:fitbit_steps_intraday_rapids_sumdurationsedentarybout:allday",
           "total time spent sedentary (minutes)",
           "total_time_spent_sedentary(minutes)", "minutes",
           "This is the total time the participant spent sedentary over the "
           "day.",
           -1,
           {"sedentary"}},
          {"f_steps:fitbit_steps_intraday_rapids_countepisodeactivebout:allday",
           "number of activity episodes", "number_of_activity_episodes", "",
           "This is the number of separate stretches of physical activity "
           "recorded by the smartwatch.",
           -1,
           {"active", "activity", "episode", "episodes"}},
          {"f_steps:fitbit_steps_intraday_rapids_sumdurationactivebout:allday",
           "total time spent active (minutes)",
           "total_time_spent_active(minutes)", "minutes",
           "This is the total time the participant spent physically active "
           "over the day.",
           -1,
           {"active", "activity"}},
          {"f_slp:fitbit_sleep_intraday_rapids_sumdurationasleepunifiedmain:allday",
           "total time asleep (minutes)", "total_time_asleep(minutes)",
           "minutes",
           "This is the total time the participant spent asleep during their "
           "main sleep period, as measured by the smartwatch.",
           -1,
           {"sleep", "asleep", "slept", "sleeping"}},
          {"f_slp:fitbit_sleep_intraday_rapids_sumdurationawakeunifiedmain:allday",
           "total time spent awake while in bed (minutes)",
           "total_time_spent_awake_while_in_bed(minutes)", "minutes",
           "This is the total time the participant spent awake while in bed "
           "during their main sleep period.",
           -1,
           {"awake", "bed", "wakefulness"}},
      });
  return schema;
}

}  // namespace phenollm
