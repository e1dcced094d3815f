try:
    import pymysql
except ImportError:  # MySQL is optional; SQLite is the default backend
    pymysql = None
else:
    pymysql.install_as_MySQLdb()
