#pragma once

#include "irrsel/classify.hpp"
#include "irrsel/commands.hpp"
#include "irrsel/csv.hpp"
#include "irrsel/error.hpp"
#include "irrsel/grant_reviews.hpp"
#include "irrsel/inference.hpp"
#include "irrsel/normal.hpp"
#include "irrsel/parallel.hpp"
#include "irrsel/random.hpp"
#include "irrsel/ratings.hpp"
#include "irrsel/report.hpp"
#include "irrsel/simulate.hpp"
#include "irrsel/simulate_io.hpp"
#include "irrsel/svg.hpp"
#include "irrsel/variance.hpp"
