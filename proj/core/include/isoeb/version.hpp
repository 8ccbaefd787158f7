#pragma once

#define ISOEB_VERSION "0.1.0"
