#pragma once

#include "walkcover/errors.hpp"
#include "walkcover/rational.hpp"
#include "walkcover/numeric.hpp"
#include "walkcover/tree.hpp"
#include "walkcover/gadget.hpp"
#include "walkcover/truncation.hpp"
#include "walkcover/kernel.hpp"
#include "walkcover/profile.hpp"
#include "walkcover/dp.hpp"
#include "walkcover/estimate.hpp"
#include "walkcover/last_vertex.hpp"
#include "walkcover/hitting.hpp"
#include "walkcover/extensions.hpp"
#include "walkcover/report_json.hpp"
