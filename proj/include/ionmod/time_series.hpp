#ifndef IONMOD_TIME_SERIES_HPP
#define IONMOD_TIME_SERIES_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace ionmod {

/// Sampled (t, value) pairs with unit labels. Samples are kept in time order.
struct TimeSeries {
    std::vector<double> t;
    std::vector<double> value;
    std::string time_unit = "s";
    std::string value_unit;

    std::size_t size() const noexcept { return t.size(); }
    bool empty() const noexcept { return t.empty(); }

    void push_back(double time, double v) {
        t.push_back(time);
        value.push_back(v);
    }
};

}  // namespace ionmod

#endif  // IONMOD_TIME_SERIES_HPP
