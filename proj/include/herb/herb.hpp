#pragma once

#include "herb/choropleth.hpp"
#include "herb/downstream.hpp"
#include "herb/error.hpp"
#include "herb/lexicon.hpp"
#include "herb/metric.hpp"
#include "herb/prompts.hpp"
#include "herb/region_tree.hpp"
#include "herb/report.hpp"
#include "herb/score_store.hpp"
#include "herb/suites.hpp"
#include "herb/text_io.hpp"
#include "herb/vector_math.hpp"
