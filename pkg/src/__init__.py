"""fpdtrack source package."""
