#include "storyaudit/demography.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "storyaudit/text.hpp"

namespace storyaudit::demography {

namespace {

using std::string_view;

constexpr std::array<string_view, 6> kNonBinary = {"they", "them",       "their",
                                                   "theirs", "themselves", "mx"};

constexpr std::array<string_view, 15> kFeminized = {
    "she",    "her",        "hers", "herself",   "girl",        "woman",
    "mrs",    "ms",         "miss", "mother",    "sister",      "girlfriend",
    "wife",   "grandmother", "transwoman"};

constexpr std::array<string_view, 14> kMasculinized = {
    "he",      "him",        "his", "himself", "boy",       "man",
    "mr",      "mister",     "father", "brother", "boyfriend", "husband",
    "grandfather", "transman"};

constexpr std::array<string_view, 7> kTitles = {"mr", "mrs", "ms", "miss", "mister", "mx", "dr"};

constexpr std::array<string_view, 30> kNhpiCountries = {
    "American Samoa", "Cook Island",   "Cook Islands",  "East Timor",
    "Fiji",           "French Polynesia", "Guam",       "I-Kiribati",
    "Kiribati",       "Marshall Islands", "Marshallese", "Micronesia",
    "Nauru",          "New Caledonia", "Ni-Vanuatu",    "Niue",
    "Norfolk Island", "Northern Mariana Islands", "Palau", "Pitcairn Islands",
    "Samoa",          "Solomon Island", "Solomon Islands", "Timor-Leste",
    "Timorese",       "Tokelau",       "Tonga",         "Tuvalu",
    "Vanuatu",        "Wallis and Futuna"};

constexpr std::array<string_view, 26> kMenaCountries = {
    "Algeria",   "Bahrain", "Egypt",        "Iran",      "Iraq",    "Israel",
    "Jordan",    "Kuwait",  "Lebanese",     "Lebanon",   "Libya",   "Moroccan",
    "Morocco",   "Oman",    "Palestine",    "Palestinian", "Qatar", "Sahrawi",
    "Saudi",     "Saudi Arabia", "Syria",   "Tunisia",   "Turkey",  "Turkish",
    "United Arab Emirates", "Yemen"};

template <std::size_t N>
std::unordered_set<std::string> make_set(const std::array<string_view, N>& words) {
  std::unordered_set<std::string> out;
  for (auto w : words) out.insert(text::to_lower(w));
  return out;
}

const std::unordered_set<std::string>& nonbinary_set() {
  static const auto s = make_set(kNonBinary);
  return s;
}
const std::unordered_set<std::string>& feminized_set() {
  static const auto s = make_set(kFeminized);
  return s;
}
const std::unordered_set<std::string>& masculinized_set() {
  static const auto s = make_set(kMasculinized);
  return s;
}
const std::unordered_set<std::string>& title_set() {
  static const auto s = make_set(kTitles);
  return s;
}

constexpr std::array<RaceCategory, 5> kVoterRaces = {RaceCategory::White, RaceCategory::Latine,
                                                     RaceCategory::Black, RaceCategory::Asian,
                                                     RaceCategory::Aian};
constexpr std::array<RaceCategory, 2> kCountryRaces = {RaceCategory::Mena, RaceCategory::Nhpi};

}  // namespace

std::span<const string_view> nonbinary_words() { return kNonBinary; }
std::span<const string_view> feminized_words() { return kFeminized; }
std::span<const string_view> masculinized_words() { return kMasculinized; }
std::span<const string_view> honorific_titles() { return kTitles; }

GenderCategory gender_of(std::span<const std::string> references) {
  const auto& nb = nonbinary_set();
  const auto& fem = feminized_set();
  const auto& masc = masculinized_set();
  bool has_nb = false, has_f = false, has_m = false;
  for (const auto& ref : references) {
    const std::string norm = text::normalize_token(ref);
    if (norm.empty()) continue;
    if (nb.count(norm)) has_nb = true;
    if (fem.count(norm)) has_f = true;
    if (masc.count(norm)) has_m = true;
  }
  const int lists = (has_nb ? 1 : 0) + (has_f ? 1 : 0) + (has_m ? 1 : 0);
  if (lists == 0) return GenderCategory::Unspecified;
  if (lists > 1) return GenderCategory::Unsure;
  if (has_nb) return GenderCategory::NonBinary;
  return has_f ? GenderCategory::Feminized : GenderCategory::Masculinized;
}

GenderCategory gender_of(const std::vector<std::string>& references) {
  return gender_of(std::span<const std::string>(references.data(), references.size()));
}

std::optional<PairCategory> pair_of(GenderCategory g1, GenderCategory g2) {
  auto binary_or_nb = [](GenderCategory g) {
    return g == GenderCategory::NonBinary || g == GenderCategory::Feminized ||
           g == GenderCategory::Masculinized;
  };
  if (!binary_or_nb(g1) || !binary_or_nb(g2)) return std::nullopt;
  auto has = [&](GenderCategory a, GenderCategory b) {
    return (g1 == a && g2 == b) || (g1 == b && g2 == a);
  };
  if (has(GenderCategory::NonBinary, GenderCategory::NonBinary)) return PairCategory::NbNb;
  if (has(GenderCategory::NonBinary, GenderCategory::Feminized)) return PairCategory::NbF;
  if (has(GenderCategory::NonBinary, GenderCategory::Masculinized)) return PairCategory::NbM;
  if (has(GenderCategory::Feminized, GenderCategory::Feminized)) return PairCategory::FF;
  if (has(GenderCategory::Masculinized, GenderCategory::Masculinized)) return PairCategory::MM;
  return PairCategory::FM;
}

CountryGroup classify_country(string_view country) {
  const std::string lowered = text::to_lower(country);
  for (auto c : kMenaCountries)
    if (text::to_lower(c) == lowered) return CountryGroup::Mena;
  for (auto c : kNhpiCountries)
    if (text::to_lower(c) == lowered) return CountryGroup::Nhpi;
  return CountryGroup::Other;
}

std::optional<std::string> first_name(string_view full) {
  const auto& titles = title_set();
  for (const auto& tok : text::tokenize(full)) {
    const std::string norm = text::normalize_token(tok);
    if (norm.empty()) continue;
    if (titles.count(norm)) continue;
    return norm;
  }
  return std::nullopt;
}

const NameEntry* LikelihoodTable::find(const std::string& normalized_first_name) const {
  auto it = names.find(normalized_first_name);
  return it == names.end() ? nullptr : &it->second;
}

double LikelihoodTable::likelihood_of(const std::string& normalized_first_name,
                                      RaceCategory race) const {
  const auto* entry = find(normalized_first_name);
  if (!entry) return 0.0;
  auto it = entry->likelihood.find(race);
  return it == entry->likelihood.end() ? 0.0 : it->second;
}

std::int64_t LikelihoodTable::group_persons(RaceCategory race) const {
  double mass = 0.0;
  for (const auto& [name, entry] : names) {
    auto it = entry.likelihood.find(race);
    if (it != entry.likelihood.end()) mass += it->second * static_cast<double>(entry.persons);
  }
  return static_cast<std::int64_t>(std::llround(mass));
}

std::span<const RaceCategory> voter_races() { return kVoterRaces; }
std::span<const RaceCategory> country_races() { return kCountryRaces; }

std::optional<RaceCategory> parse_voter_race(string_view code) {
  const std::string c = text::to_lower(code);
  if (c == "white") return RaceCategory::White;
  if (c == "hispanic" || c == "latine" || c == "latino" || c == "hispanic or latino")
    return RaceCategory::Latine;
  if (c == "black" || c == "african-american" || c == "african american")
    return RaceCategory::Black;
  if (c == "asian" || c == "api" || c == "asian pacific islander" ||
      c == "asian or pacific islander")
    return RaceCategory::Asian;
  if (c == "aian" || c == "ai/an" || c == "american indian or alaska native" ||
      c == "american indian" || c == "native american")
    return RaceCategory::Aian;
  return std::nullopt;
}

LikelihoodTable build_voter_table(
    const std::function<bool(std::string& name, std::string& race)>& next,
    VoterBuildReport* report) {
  std::map<std::string, std::map<RaceCategory, std::int64_t>> counts;
  VoterBuildReport rep;
  std::string raw_name, raw_race;
  while (next(raw_name, raw_race)) {
    const auto race = parse_voter_race(raw_race);
    if (!race) {
      ++rep.rejected_unknown_race;
      continue;
    }
    const auto name = first_name(raw_name);
    if (!name) {
      ++rep.rejected_empty_name;
      continue;
    }
    ++counts[*name][*race];
    ++rep.accepted;
  }

  LikelihoodTable table;
  table.provider = "voter";
  for (auto& [name, by_race] : counts) {
    NameEntry entry;
    std::int64_t total = 0;
    for (auto& [race, n] : by_race) total += n;
    for (auto race : kVoterRaces) {
      auto it = by_race.find(race);
      const std::int64_t n = it == by_race.end() ? 0 : it->second;
      entry.likelihood[race] = static_cast<double>(n) / static_cast<double>(total);
    }
    entry.persons = total;
    table.total_persons += total;
    table.names.emplace(name, std::move(entry));
  }
  table.total_names = static_cast<std::int64_t>(table.names.size());
  if (report) *report = rep;
  return table;
}

LikelihoodTable build_country_table(
    const std::function<bool(std::string& name, std::string& country)>& next) {
  struct Tally {
    std::int64_t mena = 0, nhpi = 0, total = 0;
  };
  std::map<std::string, Tally> counts;
  std::string raw_name, raw_country;
  while (next(raw_name, raw_country)) {
    const auto name = first_name(raw_name);
    if (!name) continue;
    auto& tally = counts[*name];
    ++tally.total;
    switch (classify_country(raw_country)) {
      case CountryGroup::Mena: ++tally.mena; break;
      case CountryGroup::Nhpi: ++tally.nhpi; break;
      case CountryGroup::Other: break;
    }
  }

  LikelihoodTable table;
  table.provider = "country";
  for (auto& [name, tally] : counts) {
    NameEntry entry;
    entry.likelihood[RaceCategory::Mena] =
        static_cast<double>(tally.mena) / static_cast<double>(tally.total);
    entry.likelihood[RaceCategory::Nhpi] =
        static_cast<double>(tally.nhpi) / static_cast<double>(tally.total);
    entry.persons = tally.total;
    table.total_persons += tally.total;
    table.names.emplace(name, std::move(entry));
  }
  table.total_names = static_cast<std::int64_t>(table.names.size());
  return table;
}

namespace {

template <typename Vec>
auto vector_feed(const Vec& records) {
  return [&records, i = std::size_t{0}](std::string& a, std::string& b) mutable {
    if (i >= records.size()) return false;
    a = records[i].first;
    b = records[i].second;
    ++i;
    return true;
  };
}

}  // namespace

LikelihoodTable build_voter_table(const std::vector<std::pair<std::string, std::string>>& records,
                                  VoterBuildReport* report) {
  return build_voter_table(vector_feed(records), report);
}

LikelihoodTable build_country_table(
    const std::vector<std::pair<std::string, std::string>>& records) {
  return build_country_table(vector_feed(records));
}

namespace {

struct ProviderFile {
  std::ifstream in;
  char delim = '\t';
  int name_col = -1;
  int value_col = -1;
  int line_no = 1;
  std::string path;
};

ProviderFile open_provider_file(const std::string& path, const std::string& value_header) {
  ProviderFile f;
  f.path = path;
  f.in.open(path, std::ios::binary);
  if (!f.in) throw DataError("cannot open provider file: " + path);
  std::string header;
  if (!std::getline(f.in, header)) throw DataError(path + ": empty provider file");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  f.delim = header.find('\t') != std::string::npos ? '\t' : ',';
  std::istringstream hs(header);
  std::string col;
  int idx = 0;
  while (std::getline(hs, col, f.delim)) {
    const std::string lowered = text::to_lower(col);
    if (lowered == "first_name") f.name_col = idx;
    if (lowered == value_header) f.value_col = idx;
    ++idx;
  }
  if (f.name_col < 0 || f.value_col < 0)
    throw DataError(path + ":1: header must name first_name and " + value_header);
  return f;
}

auto provider_feed(ProviderFile& f) {
  return [&f](std::string& name, std::string& value) {
    std::string line;
    while (std::getline(f.in, line)) {
      ++f.line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::istringstream row(line);
      std::string field;
      int idx = 0;
      name.clear();
      value.clear();
      bool have_name = false, have_value = false;
      while (std::getline(row, field, f.delim)) {
        if (idx == f.name_col) {
          name = field;
          have_name = true;
        }
        if (idx == f.value_col) {
          value = field;
          have_value = true;
        }
        ++idx;
      }
      if (!have_name || !have_value)
        throw DataError(f.path + ":" + std::to_string(f.line_no) + ": short row");
      return true;
    }
    return false;
  };
}

}  // namespace

LikelihoodTable build_voter_table_from_files(const std::vector<std::string>& paths,
                                             VoterBuildReport* report) {
  std::vector<ProviderFile> files;
  files.reserve(paths.size());
  for (const auto& path : paths) files.push_back(open_provider_file(path, "race"));
  std::size_t current = 0;
  auto next = [&](std::string& name, std::string& race) {
    while (current < files.size()) {
      if (provider_feed(files[current])(name, race)) return true;
      ++current;
    }
    return false;
  };
  return build_voter_table(next, report);
}

LikelihoodTable build_country_table_from_file(const std::string& path) {
  auto f = open_provider_file(path, "country");
  return build_country_table(provider_feed(f));
}

const LikelihoodTable& Tables::provider_for(RaceCategory race) const {
  return (race == RaceCategory::Mena || race == RaceCategory::Nhpi) ? country : voter;
}

std::optional<std::map<RaceCategory, double>> lookup(const LikelihoodTable& table,
                                                     const std::string& name,
                                                     CoverageCounter& coverage) {
  ++coverage.named;
  const auto* entry = table.find(name);
  if (!entry) return std::nullopt;
  ++coverage.matched;
  return entry->likelihood;
}

void save_table(const LikelihoodTable& table, const std::string& path) {
  std::ostringstream body;
  const auto races = table.provider == "voter"
                         ? std::vector<RaceCategory>(kVoterRaces.begin(), kVoterRaces.end())
                         : std::vector<RaceCategory>(kCountryRaces.begin(), kCountryRaces.end());
  for (const auto& [name, entry] : table.names) {
    body << name;
    for (auto race : races) {
      auto it = entry.likelihood.find(race);
      body << '\t' << text::format_double(it == entry.likelihood.end() ? 0.0 : it->second);
    }
    body << '\t' << entry.persons << '\n';
  }
  const std::string data = body.str();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write table file: " + path);
  out << "#storyaudit-table v1\n";
  out << "#provider\t" << table.provider << '\n';
  out << "#total_names\t" << table.total_names << '\n';
  out << "#total_persons\t" << table.total_persons << '\n';
  out << "#checksum\tfnv1a:" << text::hex64(text::fnv1a64(data)) << '\n';
  out << "name";
  for (auto race : races) out << '\t' << to_string(race);
  out << "\tpersons\n";
  out << data;
  if (!out) throw DataError("short write on table file: " + path);
}

LikelihoodTable load_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open table file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "#storyaudit-table v1")
    throw DataError(path + ":1: not a storyaudit table file");

  LikelihoodTable table;
  std::string checksum;
  int line_no = 1;
  std::vector<RaceCategory> races;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind("#provider\t", 0) == 0) {
      table.provider = line.substr(10);
    } else if (line.rfind("#total_names\t", 0) == 0) {
      table.total_names = std::stoll(line.substr(13));
    } else if (line.rfind("#total_persons\t", 0) == 0) {
      table.total_persons = std::stoll(line.substr(15));
    } else if (line.rfind("#checksum\tfnv1a:", 0) == 0) {
      checksum = line.substr(16);
    } else if (line.rfind("name\t", 0) == 0) {
      std::istringstream hdr(line);
      std::string col;
      std::getline(hdr, col, '\t');  // "name"
      while (std::getline(hdr, col, '\t')) {
        if (col == "persons") continue;
        auto race = race_from_string(col);
        if (!race) throw DataError(path + ":" + std::to_string(line_no) + ": unknown race column");
        races.push_back(*race);
      }
      break;
    } else {
      throw DataError(path + ":" + std::to_string(line_no) + ": unexpected header line");
    }
  }
  if (races.empty()) throw DataError(path + ": missing column header");

  std::ostringstream body;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    body << line << '\n';
    std::istringstream row(line);
    std::string name, field;
    if (!std::getline(row, name, '\t'))
      throw DataError(path + ":" + std::to_string(line_no) + ": missing name");
    NameEntry entry;
    for (auto race : races) {
      if (!std::getline(row, field, '\t'))
        throw DataError(path + ":" + std::to_string(line_no) + ": missing likelihood for " +
                        std::string(to_string(race)));
      entry.likelihood[race] = std::stod(field);
    }
    if (!std::getline(row, field, '\t'))
      throw DataError(path + ":" + std::to_string(line_no) + ": missing persons column");
    entry.persons = std::stoll(field);
    table.names.emplace(name, std::move(entry));
  }
  if (!checksum.empty() && checksum != text::hex64(text::fnv1a64(body.str())))
    throw DataError(path + ": table checksum mismatch");
  return table;
}

double BaselineDistribution::at(const std::string& key) const {
  auto it = proportions.find(key);
  if (it == proportions.end()) throw DataError("baseline " + source + " has no key " + key);
  return it->second;
}

BaselineDistribution gender_baseline() {
  // HPS shares 1.7 / 50.5 / 47.2, renormalized and stored unrounded.
  const double total = 1.7 + 50.5 + 47.2;
  BaselineDistribution b;
  b.source = "hps-gender";
  b.proportions[std::string(to_string(GenderCategory::NonBinary))] = 1.7 / total;
  b.proportions[std::string(to_string(GenderCategory::Feminized))] = 50.5 / total;
  b.proportions[std::string(to_string(GenderCategory::Masculinized))] = 47.2 / total;
  return b;
}

BaselineDistribution pair_baseline() {
  // HPS orientation shares renormalized over {something else, gay or lesbian,
  // straight}, then spread uniformly across compatible pairs.
  const double total = 1.9 + 3.3 + 88.3;
  const double something_else = 1.9 / total;
  const double gay_or_lesbian = 3.3 / total;
  const double straight = 88.3 / total;
  BaselineDistribution b;
  b.source = "hps-pairs";
  b.proportions[std::string(to_string(PairCategory::NbNb))] = something_else / 3.0;
  b.proportions[std::string(to_string(PairCategory::NbF))] = something_else / 3.0;
  b.proportions[std::string(to_string(PairCategory::NbM))] = something_else / 3.0;
  b.proportions[std::string(to_string(PairCategory::FF))] = gay_or_lesbian / 2.0;
  b.proportions[std::string(to_string(PairCategory::MM))] = gay_or_lesbian / 2.0;
  b.proportions[std::string(to_string(PairCategory::FM))] = straight;
  return b;
}

BaselineDistribution race_baseline(RaceBaselineSource source,
                                   const LikelihoodTable* country_table) {
  BaselineDistribution b;
  switch (source) {
    case RaceBaselineSource::Census2022:
      b.source = "census2022";
      b.proportions[std::string(to_string(RaceCategory::White))] = 0.589;
      b.proportions[std::string(to_string(RaceCategory::Latine))] = 0.191;
      b.proportions[std::string(to_string(RaceCategory::Black))] = 0.136;
      b.proportions[std::string(to_string(RaceCategory::Asian))] = 0.063;
      b.proportions[std::string(to_string(RaceCategory::Aian))] = 0.013;
      b.proportions[std::string(to_string(RaceCategory::Nhpi))] = 0.004;
      break;
  }
  if (country_table)
    b.proportions[std::string(to_string(RaceCategory::Mena))] = mena_baseline(*country_table);
  return b;
}

double mena_baseline(const LikelihoodTable& country_table) {
  if (country_table.total_persons == 0) throw DataError("country table is empty");
  return static_cast<double>(country_table.group_persons(RaceCategory::Mena)) /
         static_cast<double>(country_table.total_persons);
}

BaselineDistribution load_baseline(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open baseline file: " + path);
  BaselineDistribution b;
  b.source = path;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError(path + ":" + std::to_string(line_no) + ": expected key<TAB>proportion");
    b.proportions[line.substr(0, tab)] = std::stod(line.substr(tab + 1));
  }
  return b;
}

void save_baseline(const BaselineDistribution& baseline, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write baseline file: " + path);
  out << "#storyaudit-baseline\t" << baseline.source << '\n';
  for (const auto& [key, value] : baseline.proportions)
    out << key << '\t' << text::format_double(value) << '\n';
}

}  // namespace storyaudit::demography
