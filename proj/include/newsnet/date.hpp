#pragma once

#include <algorithm>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace newsnet {

// Calendar date stored as a day serial (days since 1970-01-01).
// Uses the civil-date conversion of Howard Hinnant's algorithms so that
// date arithmetic is plain integer arithmetic.
class Date {
 public:
  Date() : serial_(0) {}
  explicit Date(int serial) : serial_(serial) {}

  static Date from_ymd(int year, int month, int day) {
    year -= month <= 2;
    const int era = (year >= 0 ? year : year - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(year - era * 400);
    const unsigned doy =
        (153u * static_cast<unsigned>(month + (month > 2 ? -3 : 9)) + 2u) / 5u +
        static_cast<unsigned>(day) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return Date(era * 146097 + static_cast<int>(doe) - 719468);
  }

  struct Ymd {
    int year;
    unsigned month;
    unsigned day;
  };

  Ymd ymd() const {
    int z = serial_ + 719468;
    const int era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int y = static_cast<int>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {y + (m <= 2), m, d};
  }

  // Strict YYYY-MM-DD.
  static std::optional<Date> parse(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    auto digits = [](std::string_view t) -> std::optional<int> {
      int v = 0;
      for (char c : t) {
        if (c < '0' || c > '9') return std::nullopt;
        v = v * 10 + (c - '0');
      }
      return v;
    };
    auto y = digits(s.substr(0, 4));
    auto m = digits(s.substr(5, 2));
    auto d = digits(s.substr(8, 2));
    if (!y || !m || !d || *m < 1 || *m > 12 || *d < 1 || *d > 31) return std::nullopt;
    Date out = from_ymd(*y, *m, *d);
    auto back = out.ymd();
    if (back.year != *y || back.month != static_cast<unsigned>(*m) ||
        back.day != static_cast<unsigned>(*d))
      return std::nullopt;  // e.g. Feb 30
    return out;
  }

  std::string str() const {
    auto [y, m, d] = ymd();
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, d);
    return buf;
  }

  int serial() const { return serial_; }
  // 0 = Monday ... 6 = Sunday.
  int weekday() const { return ((serial_ % 7) + 10) % 7; }
  bool is_weekend() const { return weekday() >= 5; }

  Date operator+(int days) const { return Date(serial_ + days); }
  Date operator-(int days) const { return Date(serial_ - days); }
  int operator-(Date other) const { return serial_ - other.serial_; }
  bool operator==(const Date& o) const { return serial_ == o.serial_; }
  bool operator!=(const Date& o) const { return serial_ != o.serial_; }
  bool operator<(const Date& o) const { return serial_ < o.serial_; }
  bool operator<=(const Date& o) const { return serial_ <= o.serial_; }
  bool operator>(const Date& o) const { return serial_ > o.serial_; }
  bool operator>=(const Date& o) const { return serial_ >= o.serial_; }

 private:
  int serial_;
};

// Half-open interval [start, end).
struct DateRange {
  Date start;
  Date end;

  bool contains(Date d) const { return start <= d && d < end; }
  bool empty() const { return end <= start; }
};

// Calendar quarters [Q start, next Q start) covering [start, end), clipped.
inline std::vector<DateRange> calendar_quarters(Date start, Date end) {
  std::vector<DateRange> out;
  if (end <= start) return out;
  auto [y, m, d] = start.ymd();
  int qy = y;
  unsigned qm = 1u + 3u * ((m - 1) / 3);
  Date qstart = Date::from_ymd(qy, static_cast<int>(qm), 1);
  while (qstart < end) {
    int ny = qy;
    unsigned nm = qm + 3;
    if (nm > 12) {
      nm -= 12;
      ++ny;
    }
    Date qend = Date::from_ymd(ny, static_cast<int>(nm), 1);
    out.push_back({std::max(qstart, start), std::min(qend, end)});
    qy = ny;
    qm = nm;
    qstart = qend;
  }
  return out;
}

inline std::string quarter_label(Date d) {
  auto [y, m, day] = d.ymd();
  (void)day;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04dQ%u", y, (m - 1) / 3 + 1);
  return buf;
}

// Sorted unique list of dates with index lookup.
class Calendar {
 public:
  Calendar() = default;
  explicit Calendar(std::vector<Date> days) : days_(std::move(days)) {
    std::sort(days_.begin(), days_.end());
    days_.erase(std::unique(days_.begin(), days_.end()), days_.end());
  }

  const std::vector<Date>& days() const { return days_; }
  std::size_t size() const { return days_.size(); }
  bool empty() const { return days_.empty(); }
  Date operator[](std::size_t i) const { return days_[i]; }

  std::optional<std::size_t> index_of(Date d) const {
    auto it = std::lower_bound(days_.begin(), days_.end(), d);
    if (it == days_.end() || *it != d) return std::nullopt;
    return static_cast<std::size_t>(it - days_.begin());
  }

  // Index of the first day >= d, if any.
  std::optional<std::size_t> index_on_or_after(Date d) const {
    auto it = std::lower_bound(days_.begin(), days_.end(), d);
    if (it == days_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - days_.begin());
  }

 private:
  std::vector<Date> days_;
};

}  // namespace newsnet
