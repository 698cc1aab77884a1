# API endpoints module
